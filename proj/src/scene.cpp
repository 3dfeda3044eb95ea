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

#include "eqf/scene.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eqf
{

Scene Scene::empty(const Config & config)
{
  Scene s;
  s.histories = nd::Array({config.agents, config.t_in, 2});
  s.agent_mask.assign(config.agents, false);
  s.map = nd::Array({config.lanes, config.lane_points, 2});
  s.lane_mask.assign(config.lanes, false);
  return s;
}

Point Scene::history(std::size_t agent, std::size_t t) const
{
  return {histories.at({agent, t, 0}), histories.at({agent, t, 1})};
}

void Scene::set_history(std::size_t agent, std::size_t t, Point p)
{
  histories.at({agent, t, 0}) = p.x;
  histories.at({agent, t, 1}) = p.y;
}

Point Scene::lane_point(std::size_t lane, std::size_t k) const
{
  return {map.at({lane, k, 0}), map.at({lane, k, 1})};
}

void Scene::set_lane_point(std::size_t lane, std::size_t k, Point p)
{
  map.at({lane, k, 0}) = p.x;
  map.at({lane, k, 1}) = p.y;
}

std::size_t Scene::valid_agents() const
{
  return static_cast<std::size_t>(std::count(agent_mask.begin(), agent_mask.end(), true));
}

GroundTruth GroundTruth::empty(const Config & config)
{
  GroundTruth g;
  g.futures = nd::Array({config.agents, config.t_out, 2});
  g.agent_mask.assign(config.agents, false);
  return g;
}

Point GroundTruth::future(std::size_t agent, std::size_t t) const
{
  return {futures.at({agent, t, 0}), futures.at({agent, t, 1})};
}

void GroundTruth::set_future(std::size_t agent, std::size_t t, Point p)
{
  futures.at({agent, t, 0}) = p.x;
  futures.at({agent, t, 1}) = p.y;
}

Point ForecastSet::point(std::size_t agent, std::size_t head, std::size_t t) const
{
  return {trajectories.at({agent, head, t, 0}), trajectories.at({agent, head, t, 1})};
}

Se2Transform Se2Transform::from_angle(double radians, Point translation)
{
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  return {{c, -s, s, c}, translation};
}

Point Se2Transform::rotate(Point v) const
{
  return {rotation[0] * v.x + rotation[1] * v.y, rotation[2] * v.x + rotation[3] * v.y};
}

Point Se2Transform::apply(Point p) const
{
  const Point r = rotate(p);
  return {r.x + translation.x, r.y + translation.y};
}

Se2Transform Se2Transform::inverse() const
{
  Se2Transform inv;
  inv.rotation = {rotation[0], rotation[2], rotation[1], rotation[3]};
  const Point t = inv.rotate(translation);
  inv.translation = {-t.x, -t.y};
  return inv;
}

Se2Transform Se2Transform::after(const Se2Transform & first) const
{
  Se2Transform out;
  const auto & a = rotation;
  const auto & b = first.rotation;
  out.rotation = {
    a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
    a[2] * b[1] + a[3] * b[3]};
  out.translation = apply(first.translation);
  return out;
}

double Se2Transform::orthogonality_error() const
{
  const auto & r = rotation;
  const double e00 = r[0] * r[0] + r[2] * r[2] - 1.0;
  const double e01 = r[0] * r[1] + r[2] * r[3];
  const double e11 = r[1] * r[1] + r[3] * r[3] - 1.0;
  return std::max({std::abs(e00), std::abs(e01), std::abs(e11)});
}

namespace
{

void check_rows(
  const nd::Array & coords, const std::vector<bool> & mask, const char * kind, Violations & out)
{
  const std::size_t rows = coords.dim(0);
  const std::size_t steps = coords.dim(1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t t = 0; t < steps; ++t) {
      const double x = coords.at({r, t, 0});
      const double y = coords.at({r, t, 1});
      if (!std::isfinite(x) || !std::isfinite(y)) {
        out.push_back({std::string("non-finite ") + kind + " coordinate", {r, t}});
      } else if (!mask[r] && (x != 0.0 || y != 0.0)) {
        out.push_back({std::string("masked ") + kind + " has nonzero coordinates", {r, t}});
      }
    }
  }
}

bool shaped(const nd::Array & a, std::size_t rank, std::size_t last)
{
  return a.rank() == rank && a.shape().back() == last;
}

}  // namespace

Violations validate(const Scene & scene)
{
  Violations out;
  if (!shaped(scene.histories, 3, 2)) {
    out.push_back({"histories must have shape [A, T_in, 2], got " + nd::to_string(scene.histories.shape()), {}});
    return out;
  }
  if (!shaped(scene.map, 3, 2)) {
    out.push_back({"map must have shape [L, K, 2], got " + nd::to_string(scene.map.shape()), {}});
    return out;
  }
  if (scene.agent_mask.size() != scene.agents()) {
    out.push_back({"agent mask length differs from agent count", {}});
    return out;
  }
  if (scene.lane_mask.size() != scene.lanes()) {
    out.push_back({"lane mask length differs from lane count", {}});
    return out;
  }
  check_rows(scene.histories, scene.agent_mask, "agent", out);
  check_rows(scene.map, scene.lane_mask, "lane", out);
  return out;
}

Violations validate(const Scene & scene, const Config & config)
{
  Violations out = validate(scene);
  if (!out.empty() && scene.histories.rank() != 3) {
    return out;
  }
  auto expect = [&](std::size_t got, std::size_t want, const char * name) {
    if (got != want) {
      out.push_back({
        std::string(name) + " is " + std::to_string(got) + " but the configuration expects " + std::to_string(want),
        {}});
    }
  };
  if (scene.histories.rank() == 3) {
    expect(scene.agents(), config.agents, "A");
    expect(scene.t_in(), config.t_in, "T_in");
  }
  if (scene.map.rank() == 3) {
    expect(scene.lanes(), config.lanes, "L");
    expect(scene.lane_points(), config.lane_points, "K");
  }
  return out;
}

Violations validate(const GroundTruth & truth)
{
  Violations out;
  if (!shaped(truth.futures, 3, 2)) {
    out.push_back({"futures must have shape [A, T_out, 2], got " + nd::to_string(truth.futures.shape()), {}});
    return out;
  }
  if (truth.agent_mask.size() != truth.agents()) {
    out.push_back({"agent mask length differs from agent count", {}});
    return out;
  }
  check_rows(truth.futures, truth.agent_mask, "agent", out);
  return out;
}

Violations validate(const ForecastSet & forecast)
{
  Violations out;
  if (!shaped(forecast.trajectories, 4, 2)) {
    out.push_back({"trajectories must have shape [A, H, T_out, 2], got " + nd::to_string(forecast.trajectories.shape()), {}});
    return out;
  }
  const std::size_t agents = forecast.agents();
  const std::size_t heads = forecast.heads();
  if (forecast.probabilities.shape() != nd::Shape{agents, heads}) {
    out.push_back({"probabilities must have shape [A, H], got " + nd::to_string(forecast.probabilities.shape()), {}});
    return out;
  }
  if (!forecast.trajectories.all_finite()) {
    out.push_back({"non-finite trajectory coordinate", {}});
  }
  for (std::size_t a = 0; a < agents; ++a) {
    double total = 0.0;
    for (std::size_t h = 0; h < heads; ++h) {
      const double p = forecast.probabilities.at({a, h});
      if (!(p >= 0.0 && p <= 1.0)) {
        out.push_back({"probability outside [0, 1]", {a, h}});
      }
      total += p;
    }
    if (!(std::abs(total - 1.0) <= 1e-6)) {
      out.push_back({"probabilities sum to " + format_double(total) + " instead of 1", {a}});
    }
  }
  return out;
}

std::string describe(const Violations & violations)
{
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i > 0) {
      os << "; ";
    }
    os << violations[i].what;
    if (!violations[i].index.empty()) {
      os << " at " << nd::to_string(violations[i].index);
    }
  }
  return os.str();
}

InvalidScene::InvalidScene(const Violations & violations)
: std::invalid_argument("invalid scene: " + describe(violations))
{
}

namespace
{

void transform_rows(nd::Array & coords, const std::vector<bool> & mask, const Se2Transform & g)
{
  const std::size_t steps = coords.dim(1);
  for (std::size_t r = 0; r < coords.dim(0); ++r) {
    if (!mask[r]) {
      continue;
    }
    for (std::size_t t = 0; t < steps; ++t) {
      const Point p = g.apply({coords.at({r, t, 0}), coords.at({r, t, 1})});
      coords.at({r, t, 0}) = p.x;
      coords.at({r, t, 1}) = p.y;
    }
  }
}

}  // namespace

Scene apply_se2(const Scene & scene, const Se2Transform & g)
{
  Scene out = scene;
  transform_rows(out.histories, out.agent_mask, g);
  transform_rows(out.map, out.lane_mask, g);
  return out;
}

GroundTruth apply_se2(const GroundTruth & truth, const Se2Transform & g)
{
  GroundTruth out = truth;
  transform_rows(out.futures, out.agent_mask, g);
  return out;
}

ForecastSet apply_se2(const ForecastSet & forecast, const Se2Transform & g)
{
  ForecastSet out = forecast;
  auto & data = out.trajectories;
  for (std::size_t i = 0; i < data.size(); i += 2) {
    const Point p = g.apply({data[i], data[i + 1]});
    data[i] = p.x;
    data[i + 1] = p.y;
  }
  return out;
}

ForecastSet constant_velocity_baseline(const Scene & scene, std::size_t t_out)
{
  const std::size_t agents = scene.agents();
  const std::size_t t_in = scene.t_in();
  ForecastSet f;
  f.trajectories = nd::Array({agents, 1, t_out, 2});
  f.probabilities = nd::Array({agents, 1}, 1.0);
  for (std::size_t a = 0; a < agents; ++a) {
    if (!scene.agent_mask[a] || t_in == 0) {
      continue;
    }
    const Point last = scene.history(a, t_in - 1);
    Point velocity{};
    if (t_in >= 2) {
      const Point prev = scene.history(a, t_in - 2);
      velocity = {last.x - prev.x, last.y - prev.y};
    }
    for (std::size_t t = 0; t < t_out; ++t) {
      const double k = static_cast<double>(t + 1);
      f.trajectories.at({a, 0, t, 0}) = last.x + k * velocity.x;
      f.trajectories.at({a, 0, t, 1}) = last.y + k * velocity.y;
    }
  }
  return f;
}

}  // namespace eqf
