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
#include "eqf/data/generator.hpp"
#include "eqf/data/scene_io.hpp"
#include "eqf/data/text_lines.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

using namespace eqf;
using namespace eqf::testing;

namespace
{

data::SceneRecord random_record(const Config & config, std::uint64_t seed, bool with_truth)
{
  Rng rng(seed);
  data::SceneRecord r;
  r.scene = random_scene(config, rng);
  if (with_truth) {
    r.truth = random_truth(r.scene, config.t_out, rng);
  }
  r.t_out = config.t_out;
  r.sample_rate_hz = config.sample_rate_hz;
  return r;
}

Config csv_config()
{
  Config c = Config::tiny();
  c.agents = 4;
  return c;
}

struct CsvTrack
{
  std::string id;
  double x0;
  double y0;
  double vx;
  double vy;
  std::size_t samples;
  bool focal{false};
};

void write_csv(const std::filesystem::path & path, const std::vector<CsvTrack> & tracks)
{
  std::ofstream out(path);
  out.precision(17);
  out << "timestamp,track_id,x,y,focal\n";
  for (const auto & tr : tracks) {
    for (std::size_t k = 0; k < tr.samples; ++k) {
      const double t = 0.1 * static_cast<double>(k);
      out << t << ',' << tr.id << ',' << tr.x0 + tr.vx * t << ',' << tr.y0 + tr.vy * t << ',' << (tr.focal ? 1 : 0)
          << '\n';
    }
  }
}

/// log P(lo <= X <= hi) for X ~ Binomial(n, 1/2), summed in log space.
double binomial_mass(std::size_t n, std::size_t lo, std::size_t hi)
{
  double total = 0.0;
  for (std::size_t k = lo; k <= hi; ++k) {
    const double log_term = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                            std::lgamma(static_cast<double>(n - k) + 1.0) - static_cast<double>(n) * std::log(2.0);
    total += std::exp(log_term);
  }
  return total;
}

}  // namespace

TEST_CASE("scene files round-trip bitwise with and without ground truth")
{
  const Config config = Config{};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (bool with_truth : {true, false}) {
      const auto rec = random_record(config, seed, with_truth);
      std::stringstream ss;
      data::write_scene(ss, rec);
      const auto back = data::read_scene(ss);
      CHECK(back.scene == rec.scene);
      CHECK(back.truth.has_value() == with_truth);
      if (with_truth) {
        CHECK(*back.truth == *rec.truth);
      }
      CHECK(back.t_out == rec.t_out);
      CHECK(back.sample_rate_hz == rec.sample_rate_hz);
      std::stringstream again;
      data::write_scene(again, back);
      CHECK(again.str() == ss.str());
    }
  }
}

TEST_CASE("directory save and load preserve order and content")
{
  const TempDir dir("scene_dir");
  std::vector<data::SceneRecord> recs;
  for (std::uint64_t s = 0; s < 3; ++s) {
    recs.push_back(random_record(Config::tiny(), s, s != 1));
  }
  data::save_scene_dir(dir.path(), recs);
  const auto back = data::load_scene_dir(dir.path());
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].scene == recs[i].scene);
    CHECK(back[i].truth == recs[i].truth);
  }
}

TEST_CASE("header agent count larger than the blocks present is an error at the block count")
{
  Config config = Config::tiny();
  config.agents = 4;
  const auto rec = random_record(config, 3, false);
  std::stringstream ss;
  data::write_scene(ss, rec);
  std::string text;
  std::string line;
  std::size_t dropped_at = 0;
  std::size_t number = 0;
  while (std::getline(ss, line)) {
    ++number;
    if (line.rfind("agent 3 ", 0) == 0) {
      dropped_at = number;
      continue;
    }
    text += line + "\n";
  }
  REQUIRE(dropped_at > 0);
  std::stringstream broken(text);
  try {
    data::read_scene(broken);
    FAIL("expected a format error");
  } catch (const data::FormatError & e) {
    CHECK(e.line() == dropped_at);
    CHECK(e.message().find("agent block 4 of 4") != std::string::npos);
  }
}

TEST_CASE("malformed scene files name the line and expectation")
{
  const auto rec = random_record(Config::tiny(), 1, true);
  std::stringstream ss;
  data::write_scene(ss, rec);
  const std::string good = ss.str();

  SUBCASE("trailing record rejected")
  {
    std::stringstream in(good + "extra 1 2\n");
    CHECK_THROWS_AS(data::read_scene(in), data::FormatError);
  }
  SUBCASE("unparsable number")
  {
    std::string bad = good;
    const auto pos = bad.find("agent 0 1 ");
    REQUIRE(pos != std::string::npos);
    bad.replace(pos, 10, "agent 0 1 nope ");
    std::stringstream in(bad);
    try {
      data::read_scene(in);
      FAIL("expected a format error");
    } catch (const data::FormatError & e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("truncated file")
  {
    std::stringstream in(good.substr(0, good.size() / 2));
    CHECK_THROWS_AS(data::read_scene(in), data::FormatError);
  }
}

TEST_CASE("straight scenes at 10 m/s and 10 Hz have histories 1 m apart")
{
  data::ScenarioSpec spec;
  spec.kind = data::ScenarioKind::kStraight;
  spec.speed = 10.0;
  spec.noise = 0.0;
  const Config config;
  const auto scenes = data::generate_scenes(spec, config, 5, 11);
  for (const auto & g : scenes) {
    const Scene & s = g.record.scene;
    for (std::size_t t = 1; t < config.t_in; ++t) {
      const Point p = s.history(0, t - 1);
      const Point q = s.history(0, t);
      CHECK(std::hypot(q.x - p.x, q.y - p.y) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("generation is seed-deterministic")
{
  data::ScenarioSpec spec;
  spec.noise = 0.2;
  spec.speed_jitter = 0.1;
  const Config config = Config::tiny();
  const auto a = data::generate_scenes(spec, config, 20, 42);
  const auto b = data::generate_scenes(spec, config, 20, 42);
  const auto c = data::generate_scenes(spec, config, 20, 43);
  REQUIRE(a.size() == b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].record.scene == b[i].record.scene);
    CHECK(a[i].record.truth == b[i].record.truth);
    CHECK(a[i].mode == b[i].mode);
    differs = differs || !(a[i].record.scene == c[i].record.scene);
  }
  CHECK(differs);
}

TEST_CASE("two-mode fork samples both modes in binomial proportion")
{
  const double mass = binomial_mass(1000, 450, 550);
  CHECK(mass > 0.998);
  data::ScenarioSpec spec;
  spec.kind = data::ScenarioKind::kFork;
  spec.modes = 2;
  const auto scenes = data::generate_scenes(spec, Config::tiny(), 1000, 2024);
  std::map<std::size_t, std::size_t> counts;
  for (const auto & g : scenes) {
    ++counts[g.mode];
  }
  REQUIRE(counts.size() == 2);
  for (const auto & [mode, count] : counts) {
    CHECK(count >= 450);
    CHECK(count <= 550);
  }
}

TEST_CASE("fork futures differ by mode while histories share a distribution")
{
  data::ScenarioSpec spec;
  spec.modes = 3;
  spec.turn_offset_min = spec.turn_offset_max = 0.0;
  const Config config;
  const auto scenes = data::generate_scenes(spec, config, 60, 5);
  std::map<std::size_t, double> end_lateral;
  for (const auto & g : scenes) {
    const Point last = g.record.truth->future(0, config.t_out - 1);
    const Point prev = g.record.scene.history(0, config.t_in - 1);
    const Point before = g.record.scene.history(0, config.t_in - 2);
    const double hx = prev.x - before.x;
    const double hy = prev.y - before.y;
    end_lateral[g.mode] = (hx * (last.y - prev.y) - hy * (last.x - prev.x)) / std::hypot(hx, hy);
  }
  REQUIRE(end_lateral.size() == 3);
  CHECK(end_lateral[0] * end_lateral[2] < 0.0);
  CHECK(std::abs(end_lateral[1]) < 1e-9);
}

TEST_CASE("every generated scene validates")
{
  for (auto kind : {data::ScenarioKind::kStraight, data::ScenarioKind::kLeftTurn, data::ScenarioKind::kRightTurn,
                    data::ScenarioKind::kFork}) {
    data::ScenarioSpec spec;
    spec.kind = kind;
    spec.noise = 0.1;
    for (const Config & config : {Config{}, Config::tiny()}) {
      for (const auto & g : data::generate_scenes(spec, config, 10, 9)) {
        CHECK(validate(g.record.scene, config).empty());
        REQUIRE(g.record.truth.has_value());
        CHECK(validate(*g.record.truth).empty());
        CHECK(g.record.truth->agent_mask == g.record.scene.agent_mask);
      }
    }
  }
}

TEST_CASE("scenario kinds parse and bad specs are rejected")
{
  CHECK(data::parse_scenario_kind("left-turn") == data::ScenarioKind::kLeftTurn);
  CHECK(data::parse_scenario_kind("fork") == data::ScenarioKind::kFork);
  CHECK_THROWS(data::parse_scenario_kind("spiral"));
  data::ScenarioSpec spec;
  spec.modes = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.modes = 2;
  spec.noise = -1.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("csv with exactly A complete tracks fills every slot")
{
  const TempDir dir("csv_full");
  const Config config = csv_config();
  const std::size_t n = config.t_in + config.t_out;
  write_csv(
    dir.path() / "s.csv",
    {{"f", 0, 0, 10, 0, n, true}, {"a", 5, 0, 10, 0, n}, {"b", 0, 5, 10, 0, n}, {"c", -5, 0, 10, 0, n}});
  const auto r = data::ingest_csv(dir.path() / "s.csv", config);
  REQUIRE(r.records.size() == 1);
  CHECK(r.skipped == 0);
  const auto & rec = r.records[0];
  CHECK(rec.scene.agent_mask == std::vector<bool>(4, true));
  CHECK(validate(rec.scene, config).empty());
  REQUIRE(rec.truth.has_value());
  CHECK(validate(*rec.truth).empty());
  CHECK(rec.scene.history(0, 1).x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rec.truth->future(0, 0).x == doctest::Approx(0.1 * 10.0 * static_cast<double>(config.t_in)).epsilon(1e-12));
}

TEST_CASE("csv with one track masks the other A-1 agents")
{
  const TempDir dir("csv_one");
  const Config config = csv_config();
  write_csv(dir.path() / "s.csv", {{"f", 1, 2, 3, 4, config.t_in + config.t_out, true}});
  const auto r = data::ingest_csv(dir.path() / "s.csv", config);
  REQUIRE(r.records.size() == 1);
  const auto & s = r.records[0].scene;
  CHECK(s.agent_mask == std::vector<bool>{true, false, false, false});
  CHECK(validate(s, config).empty());
  for (std::size_t a = 1; a < 4; ++a) {
    for (std::size_t t = 0; t < config.t_in; ++t) {
      CHECK(s.history(a, t) == Point{0.0, 0.0});
    }
  }
}

TEST_CASE("neighbour selection keeps the nearest at the last observed step")
{
  const TempDir dir("csv_near");
  const Config config = csv_config();
  const std::size_t n = config.t_in + config.t_out;
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<CsvTrack> tracks{{"focal", 0, 0, 1, 0, n, true}};
    for (int c = 0; c < 6; ++c) {
      tracks.push_back(
        {"n" + std::to_string(c), rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-8, 8), rng.uniform(-8, 8), n});
    }
    write_csv(dir.path() / "s.csv", tracks);

    // Distance sort oracle at the last observed time.
    const double t_last = 0.1 * static_cast<double>(config.t_in - 1);
    const double fx = tracks[0].x0 + tracks[0].vx * t_last;
    const double fy = tracks[0].y0 + tracks[0].vy * t_last;
    std::vector<std::pair<double, Point>> ranked;
    for (std::size_t i = 1; i < tracks.size(); ++i) {
      const Point p{tracks[i].x0 + tracks[i].vx * t_last, tracks[i].y0 + tracks[i].vy * t_last};
      ranked.push_back({std::hypot(p.x - fx, p.y - fy), p});
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto & a, const auto & b) { return a.first < b.first; });

    const auto r = data::ingest_csv(dir.path() / "s.csv", config);
    REQUIRE(r.records.size() == 1);
    const auto & s = r.records[0].scene;
    CHECK(s.agent_mask == std::vector<bool>(4, true));
    for (std::size_t k = 0; k < 3; ++k) {
      const Point got = s.history(k + 1, config.t_in - 1);
      CHECK(got.x == doctest::Approx(ranked[k].second.x).epsilon(1e-9));
      CHECK(got.y == doctest::Approx(ranked[k].second.y).epsilon(1e-9));
    }
  }
}

TEST_CASE("short focal track skips the scene with a counted warning")
{
  const TempDir dir("csv_short");
  const Config config = csv_config();
  write_csv(dir.path() / "s.csv", {{"f", 0, 0, 1, 0, config.t_in + config.t_out - 1, true}});
  const auto r = data::ingest_csv(dir.path() / "s.csv", config);
  CHECK(r.records.empty());
  CHECK(r.skipped == 1);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("skipped") != std::string::npos);
}

TEST_CASE("malformed csv names the offending line")
{
  const TempDir dir("csv_bad");
  const Config config = csv_config();
  {
    std::ofstream out(dir.path() / "s.csv");
    out << "timestamp,track_id,x,y,focal\n0,f,0,0,1\n0.1,f,1,0\n";
  }
  try {
    data::ingest_csv(dir.path() / "s.csv", config);
    FAIL("expected a format error");
  } catch (const data::FormatError & e) {
    CHECK(e.line() == 3);
  }
  {
    std::ofstream out(dir.path() / "s.csv");
    out << "timestamp,track_id,x,y,focal\n0,f,0,0,1\n0.1,f,abc,0,1\n";
  }
  try {
    data::ingest_csv(dir.path() / "s.csv", config);
    FAIL("expected a format error");
  } catch (const data::FormatError & e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("lane sidecar attaches nearest lanes resampled to K points")
{
  const TempDir dir("csv_lanes");
  const Config config = csv_config();
  write_csv(dir.path() / "s.csv", {{"f", 0, 0, 1, 0, config.t_in + config.t_out, true}});
  {
    std::ofstream out(dir.path() / "s.lanes.csv");
    out << "lane_id,x,y\nfar,100,100\nfar,110,100\nnear,0,1\nnear,4,1\n";
  }
  const auto r = data::ingest_csv(dir.path() / "s.csv", config);
  REQUIRE(r.records.size() == 1);
  const auto & s = r.records[0].scene;
  CHECK(s.lane_mask[0]);
  CHECK(s.lane_point(0, 0).x == doctest::Approx(0.0));
  CHECK(s.lane_point(0, config.lane_points - 1).x == doctest::Approx(4.0));
  CHECK(validate(s, config).empty());
}

TEST_CASE("polyline resampling is uniform in arc length")
{
  const auto pts = data::resample_polyline({{0, 0}, {1, 0}, {1, 3}}, 5);
  REQUIRE(pts.size() == 5);
  CHECK(pts[1].x == doctest::Approx(1.0));
  CHECK(pts[1].y == doctest::Approx(0.0));
  CHECK(pts[2].y == doctest::Approx(1.0));
  CHECK(pts[4].y == doctest::Approx(3.0));
  CHECK_THROWS_AS(data::resample_polyline({}, 3), std::invalid_argument);
}
