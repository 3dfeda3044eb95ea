// Copyright 2026 The eqforecast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eqf/harness/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

namespace eqf::harness
{

namespace
{

constexpr const char * kEgoColor = "#d62728";
constexpr const char * kAgentColor = "#1f77b4";
constexpr const char * kLaneColor = "#bbbbbb";

std::string num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

/// Maps scene meters to SVG pixels with a uniform scale and y pointing up.
class Viewport
{
public:
  Viewport(const std::vector<Point> & points, const PlotStyle & style) : style_(style)
  {
    double x0 = std::numeric_limits<double>::infinity();
    double y0 = x0;
    double x1 = -x0;
    double y1 = -x0;
    for (const auto & p : points) {
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
    if (points.empty()) {
      x0 = y0 = -1.0;
      x1 = y1 = 1.0;
    }
    const double span = std::max({x1 - x0, y1 - y0, 1e-6});
    scale_ = std::min(style.width, style.height) - 2.0 * style.margin;
    scale_ /= span;
    cx_ = 0.5 * (x0 + x1);
    cy_ = 0.5 * (y0 + y1);
  }

  std::string x(const Point & p) const { return num(style_.width / 2.0 + (p.x - cx_) * scale_); }
  std::string y(const Point & p) const { return num(style_.height / 2.0 - (p.y - cy_) * scale_); }

  std::string polyline(const std::vector<Point> & pts, const std::string & color, double width, const char * cls) const
  {
    std::string s = std::string("<polyline class=\"") + cls + "\" fill=\"none\" stroke=\"" + color +
                    "\" stroke-width=\"" + num(width) + "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      s += (i ? " " : "") + x(pts[i]) + "," + y(pts[i]);
    }
    return s + "\"/>\n";
  }

private:
  PlotStyle style_;
  double scale_{1.0};
  double cx_{0.0};
  double cy_{0.0};
};

}  // namespace

std::string render_svg(
  const data::SceneRecord & record, const std::optional<ForecastRecord> & forecast, const PlotStyle & style)
{
  const Scene & scene = record.scene;
  const std::size_t agents = scene.agents();
  if (forecast) {
    if (forecast->forecast.agents() != agents) {
      throw std::invalid_argument(
        "plot: forecast has " + std::to_string(forecast->forecast.agents()) + " agents, scene has " +
        std::to_string(agents));
    }
    if (forecast->agent_mask != scene.agent_mask) {
      throw std::invalid_argument("plot: forecast agent mask differs from the scene");
    }
  }

  std::vector<std::vector<Point>> history(agents);
  std::vector<std::vector<Point>> future(agents);
  std::vector<std::vector<std::vector<Point>>> heads(agents);
  std::vector<Point> all;
  for (std::size_t a = 0; a < agents; ++a) {
    if (!scene.agent_mask[a]) {
      continue;
    }
    for (std::size_t t = 0; t < scene.t_in(); ++t) {
      history[a].push_back(scene.history(a, t));
    }
    if (record.truth) {
      // Ground truth continues from the last observed point.
      future[a].push_back(history[a].back());
      for (std::size_t t = 0; t < record.truth->t_out(); ++t) {
        future[a].push_back(record.truth->future(a, t));
      }
    }
    if (forecast) {
      const auto & f = forecast->forecast;
      heads[a].resize(f.heads());
      for (std::size_t h = 0; h < f.heads(); ++h) {
        for (std::size_t t = 0; t < f.t_out(); ++t) {
          heads[a][h].push_back(f.point(a, h, t));
        }
      }
    }
    all.insert(all.end(), history[a].begin(), history[a].end());
    all.insert(all.end(), future[a].begin(), future[a].end());
    for (const auto & h : heads[a]) {
      all.insert(all.end(), h.begin(), h.end());
    }
  }
  const Viewport view(all, style);

  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(style.width) + "\" height=\"" +
         num(style.height) + "\" viewBox=\"0 0 " + num(style.width) + " " + num(style.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  svg += "<g class=\"lanes\">\n";
  for (std::size_t l = 0; l < scene.lanes(); ++l) {
    if (!scene.lane_mask[l]) {
      continue;
    }
    std::vector<Point> pts;
    for (std::size_t k = 0; k < scene.lane_points(); ++k) {
      pts.push_back(scene.lane_point(l, k));
    }
    svg += view.polyline(pts, kLaneColor, 1.0, "lane");
  }
  svg += "</g>\n";

  for (std::size_t a = 0; a < agents; ++a) {
    if (!scene.agent_mask[a]) {
      continue;
    }
    const bool ego = a == 0;
    const std::string color = ego ? kEgoColor : kAgentColor;
    const double width = ego ? 3.0 : 1.5;
    svg += "<g class=\"agent\" id=\"agent-" + std::to_string(a) + "\">\n";
    svg += view.polyline(history[a], color, width, "history");
    if (!future[a].empty()) {
      svg += view.polyline(future[a], color, width * 0.5, "truth");
    }
    for (std::size_t h = 0; h < heads[a].size(); ++h) {
      const bool selected = forecast->selected[a] == h;
      svg += "<g class=\"prediction\" data-head=\"" + std::to_string(h) + "\" fill=\"" + color + "\" opacity=\"" +
             (selected ? "0.9" : "0.5") + "\">\n";
      for (const auto & p : heads[a][h]) {
        svg += "<circle cx=\"" + view.x(p) + "\" cy=\"" + view.y(p) + "\" r=\"" + num(ego ? 2.0 : 1.5) + "\"/>\n";
      }
      svg += "</g>\n";
      if (!heads[a][h].empty()) {
        const Point end = heads[a][h].back();
        const double prob = forecast->forecast.probabilities[a * heads[a].size() + h];
        svg += "<text class=\"probability\" x=\"" + view.x(end) + "\" y=\"" + view.y(end) +
               "\" font-size=\"10\" fill=\"" + color + "\">" + num(prob) + "</text>\n";
      }
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace eqf::harness
