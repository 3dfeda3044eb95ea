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

#include "eqf/data/csv_ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace eqf::data
{

namespace
{

constexpr double kTimeTolerance = 1e-6;

struct Sample
{
  double time{0.0};
  Point p;
};

struct Track
{
  std::string id;
  std::vector<Sample> samples;
  bool focal{false};
};

std::string lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string & s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_csv(const std::string & line)
{
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    out.push_back(trim(cell));
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

/// Rows of a CSV file keyed by lower-case header names.
class CsvTable
{
public:
  explicit CsvTable(const std::filesystem::path & path) : source_(path.string())
  {
    std::ifstream in(path);
    if (!in) {
      throw std::runtime_error("cannot open " + path.string());
    }
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (trim(line).empty()) {
        continue;
      }
      auto cells = split_csv(line);
      if (header_.empty()) {
        for (auto & c : cells) {
          header_.push_back(lower(c));
        }
        continue;
      }
      if (cells.size() != header_.size()) {
        throw FormatError(
          number, "expected " + std::to_string(header_.size()) + " columns, found " + std::to_string(cells.size()),
          source_);
      }
      rows_.push_back({number, std::move(cells)});
    }
    if (header_.empty()) {
      throw FormatError(number, "missing header row", source_);
    }
  }

  std::optional<std::size_t> column(const std::string & name) const
  {
    const auto it = std::find(header_.begin(), header_.end(), name);
    if (it == header_.end()) {
      return std::nullopt;
    }
    return static_cast<std::size_t>(it - header_.begin());
  }

  std::size_t require(const std::string & name) const
  {
    const auto c = column(name);
    if (!c) {
      throw FormatError(1, "missing required column '" + name + "'", source_);
    }
    return *c;
  }

  double number(std::size_t row, std::size_t col) const
  {
    const auto v = parse_double(rows_[row].cells[col]);
    if (!v || !std::isfinite(*v)) {
      throw FormatError(
        rows_[row].line, "column '" + header_[col] + "' is not a finite number: '" + rows_[row].cells[col] + "'",
        source_);
    }
    return *v;
  }

  const std::string & cell(std::size_t row, std::size_t col) const { return rows_[row].cells[col]; }
  std::size_t size() const { return rows_.size(); }

private:
  struct Row
  {
    std::size_t line;
    std::vector<std::string> cells;
  };
  std::string source_;
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

/// Linear interpolation; nullopt when `t` falls outside the track.
std::optional<Point> position_at(const Track & track, double t)
{
  const auto & s = track.samples;
  if (s.empty() || t < s.front().time - kTimeTolerance || t > s.back().time + kTimeTolerance) {
    return std::nullopt;
  }
  const auto hi = std::lower_bound(
    s.begin(), s.end(), t, [](const Sample & a, double time) { return a.time < time; });
  if (hi == s.begin()) {
    return s.front().p;
  }
  if (hi == s.end()) {
    return s.back().p;
  }
  const auto lo = hi - 1;
  const double span = hi->time - lo->time;
  const double w = span > 0.0 ? (t - lo->time) / span : 0.0;
  return Point{lo->p.x + w * (hi->p.x - lo->p.x), lo->p.y + w * (hi->p.y - lo->p.y)};
}

std::optional<std::vector<Point>> sample_grid(const Track & track, const std::vector<double> & grid)
{
  std::vector<Point> out;
  for (double t : grid) {
    const auto p = position_at(track, t);
    if (!p) {
      return std::nullopt;
    }
    out.push_back(*p);
  }
  return out;
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

void attach_lanes(const std::filesystem::path & path, const Config & config, Point anchor, Scene & scene)
{
  if (!std::filesystem::exists(path)) {
    return;
  }
  const CsvTable table(path);
  const std::size_t id_col = table.require("lane_id");
  const std::size_t x_col = table.require("x");
  const std::size_t y_col = table.require("y");
  std::vector<std::string> order;
  std::map<std::string, std::vector<Point>> lanes;
  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto & id = table.cell(r, id_col);
    if (!lanes.contains(id)) {
      order.push_back(id);
    }
    lanes[id].push_back({table.number(r, x_col), table.number(r, y_col)});
  }
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < order.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto & p : lanes[order[i]]) {
      best = std::min(best, distance(p, anchor));
    }
    ranked.emplace_back(best, i);
  }
  std::stable_sort(ranked.begin(), ranked.end());
  for (std::size_t l = 0; l < std::min(config.lanes, ranked.size()); ++l) {
    const auto points = resample_polyline(lanes[order[ranked[l].second]], config.lane_points);
    scene.lane_mask[l] = true;
    for (std::size_t k = 0; k < points.size(); ++k) {
      scene.set_lane_point(l, k, points[k]);
    }
  }
}

}  // namespace

std::vector<Point> resample_polyline(const std::vector<Point> & points, std::size_t count)
{
  if (points.empty() || count == 0) {
    throw std::invalid_argument("resample_polyline: empty polyline or zero count");
  }
  std::vector<double> cumulative{0.0};
  for (std::size_t i = 1; i < points.size(); ++i) {
    cumulative.push_back(cumulative.back() + distance(points[i - 1], points[i]));
  }
  const double total = cumulative.back();
  std::vector<Point> out;
  std::size_t seg = 1;
  for (std::size_t k = 0; k < count; ++k) {
    if (points.size() == 1 || total == 0.0) {
      out.push_back(points.front());
      continue;
    }
    const double s = count == 1 ? 0.0 : total * static_cast<double>(k) / static_cast<double>(count - 1);
    while (seg + 1 < points.size() && cumulative[seg] < s) {
      ++seg;
    }
    const double len = cumulative[seg] - cumulative[seg - 1];
    const double w = len > 0.0 ? std::clamp((s - cumulative[seg - 1]) / len, 0.0, 1.0) : 0.0;
    const Point a = points[seg - 1];
    const Point b = points[seg];
    out.push_back({a.x + w * (b.x - a.x), a.y + w * (b.y - a.y)});
  }
  return out;
}

IngestResult ingest_csv(const std::filesystem::path & path, const Config & config)
{
  config.validate();
  const CsvTable table(path);
  const std::size_t t_col = table.require("timestamp");
  const std::size_t id_col = table.require("track_id");
  const std::size_t x_col = table.require("x");
  const std::size_t y_col = table.require("y");
  const auto type_col = table.column("object_type");
  const auto focal_col = table.column("focal");
  if (!type_col && !focal_col) {
    throw FormatError(1, "no focal flag column (object_type or focal)", path.string());
  }

  std::vector<Track> tracks;
  std::map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto & id = table.cell(r, id_col);
    auto [it, fresh] = index.try_emplace(id, tracks.size());
    if (fresh) {
      tracks.push_back({id, {}, false});
    }
    Track & tr = tracks[it->second];
    tr.samples.push_back({table.number(r, t_col), {table.number(r, x_col), table.number(r, y_col)}});
    const bool flagged = (type_col && table.cell(r, *type_col) == "AGENT") || (focal_col && table.cell(r, *focal_col) == "1");
    tr.focal = tr.focal || flagged;
  }
  for (auto & tr : tracks) {
    std::stable_sort(tr.samples.begin(), tr.samples.end(), [](const Sample & a, const Sample & b) {
      return a.time < b.time;
    });
  }
  const auto focal_count = std::count_if(tracks.begin(), tracks.end(), [](const Track & t) { return t.focal; });
  if (focal_count != 1) {
    throw FormatError(1, "expected exactly one focal track, found " + std::to_string(focal_count), path.string());
  }
  const std::size_t focal =
    static_cast<std::size_t>(std::find_if(tracks.begin(), tracks.end(), [](const Track & t) { return t.focal; }) - tracks.begin());

  IngestResult result;
  const std::size_t steps = config.t_in + config.t_out;
  std::vector<double> grid;
  const double t0 = tracks[focal].samples.front().time;
  for (std::size_t k = 0; k < steps; ++k) {
    grid.push_back(t0 + static_cast<double>(k) / config.sample_rate_hz);
  }
  const auto focal_path = sample_grid(tracks[focal], grid);
  if (!focal_path) {
    ++result.skipped;
    result.warnings.push_back(
      path.string() + ": focal track " + tracks[focal].id + " does not cover " + std::to_string(steps) +
      " steps; scene skipped");
    return result;
  }

  const std::size_t last = config.t_in - 1;
  const Point anchor = (*focal_path)[last];
  struct Candidate
  {
    double dist;
    std::string id;
    std::vector<Point> path;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (i == focal) {
      continue;
    }
    if (auto p = sample_grid(tracks[i], grid)) {
      candidates.push_back({distance((*p)[last], anchor), tracks[i].id, std::move(*p)});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate & a, const Candidate & b) {
    return a.dist != b.dist ? a.dist < b.dist : a.id < b.id;
  });

  SceneRecord rec;
  rec.scene = Scene::empty(config);
  rec.truth = GroundTruth::empty(config);
  rec.t_out = config.t_out;
  rec.sample_rate_hz = config.sample_rate_hz;
  auto place = [&](std::size_t agent, const std::vector<Point> & pts) {
    rec.scene.agent_mask[agent] = rec.truth->agent_mask[agent] = true;
    for (std::size_t t = 0; t < steps; ++t) {
      if (t < config.t_in) {
        rec.scene.set_history(agent, t, pts[t]);
      } else {
        rec.truth->set_future(agent, t - config.t_in, pts[t]);
      }
    }
  };
  place(0, *focal_path);
  for (std::size_t j = 0; j + 1 < config.agents && j < candidates.size(); ++j) {
    place(j + 1, candidates[j].path);
  }

  auto sidecar = path;
  sidecar.replace_extension();
  sidecar += ".lanes.csv";
  attach_lanes(sidecar, config, anchor, rec.scene);
  result.records.push_back(std::move(rec));
  return result;
}

IngestResult ingest_csv_dir(const std::filesystem::path & dir, const Config & config)
{
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto & entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && entry.path().extension() == ".csv" && !name.ends_with(".lanes.csv")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  IngestResult all;
  for (const auto & f : files) {
    auto r = ingest_csv(f, config);
    all.skipped += r.skipped;
    for (auto & rec : r.records) {
      all.records.push_back(std::move(rec));
    }
    for (auto & w : r.warnings) {
      all.warnings.push_back(std::move(w));
    }
  }
  return all;
}

}  // namespace eqf::data
