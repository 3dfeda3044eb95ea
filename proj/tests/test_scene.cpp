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


#include "eqf/config.hpp"
#include "eqf/geometry.hpp"
#include "eqf/scene.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace eqf;
using eqf::testing::max_abs_diff;
using eqf::testing::random_scene;
using eqf::testing::random_transform;

TEST_CASE("validate accepts a well-formed scene")
{
  Rng rng(1);
  const Config config;
  const Scene s = random_scene(config, rng, true);
  CHECK(validate(s).empty());
  CHECK(validate(s, config).empty());
  CHECK(validate(Scene::empty(config), config).empty());
}

TEST_CASE("validate reports a masked agent with nonzero coordinates at its index")
{
  Rng rng(2);
  const Config config = Config::tiny();
  Scene s = random_scene(config, rng, true);
  s.agent_mask[1] = false;
  const auto v = validate(s);
  REQUIRE_FALSE(v.empty());
  for (const auto & item : v) {
    CHECK(item.what.find("masked agent") != std::string::npos);
    REQUIRE(item.index.size() == 2);
    CHECK(item.index[0] == 1);
  }
  CHECK(v.size() == config.t_in);
  CHECK_THROWS_AS(throw InvalidScene(v), std::invalid_argument);
}

TEST_CASE("validate reports masked lanes, non-finite values and configuration mismatch")
{
  Rng rng(3);
  const Config config = Config::tiny();
  Scene s = random_scene(config, rng, true);
  s.lane_mask[0] = false;
  s.histories.at({0, 1, 0}) = std::nan("");
  const auto v = validate(s);
  bool lane = false;
  bool finite = false;
  for (const auto & item : v) {
    lane = lane || (item.what.find("masked lane") != std::string::npos && item.index[0] == 0);
    finite = finite || (item.what.find("non-finite agent") != std::string::npos && item.index == std::vector<std::size_t>{0, 1});
  }
  CHECK(lane);
  CHECK(finite);

  Config other = config;
  other.agents = 3;
  CHECK_FALSE(validate(random_scene(config, rng), other).empty());
}

TEST_CASE("forecast validation enforces the probability simplex")
{
  ForecastSet f;
  f.trajectories = nd::Array({1, 2, 3, 2});
  f.probabilities = nd::Array({1, 2}, std::vector<double>{0.5, 0.3});
  const auto v = validate(f);
  REQUIRE(v.size() == 1);
  CHECK(v[0].index == std::vector<std::size_t>{0});
  f.probabilities = nd::Array({1, 2}, std::vector<double>{0.5, 0.5});
  CHECK(validate(f).empty());
  f.probabilities = nd::Array({1, 2}, std::vector<double>{1.5, -0.5});
  CHECK(validate(f).size() == 2);
}

TEST_CASE("ground truth validation enforces zero padding")
{
  GroundTruth g = GroundTruth::empty(Config::tiny());
  CHECK(validate(g).empty());
  g.futures.at({1, 2, 1}) = 1.0;
  const auto v = validate(g);
  REQUIRE(v.size() == 1);
  CHECK(v[0].index == std::vector<std::size_t>{1, 2});
}

TEST_CASE("se2 examples")
{
  CHECK(Se2Transform::identity().apply({3.0, -4.0}) == Point{3.0, -4.0});
  const Point r = Se2Transform::from_angle(std::numbers::pi / 2).apply({1.0, 0.0});
  CHECK(r.x == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.y == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(Se2Transform::from_angle(0.0, {5.0, -2.0}).apply({1.0, 1.0}) == Point{6.0, -1.0});
}

TEST_CASE("se2 transforms are orthogonal and compose")
{
  Rng rng(4);
  const Config config = Config::tiny();
  for (int i = 0; i < 50; ++i) {
    const auto g1 = random_transform(rng);
    const auto g2 = random_transform(rng);
    CHECK(g1.orthogonality_error() < 1e-12);
    const auto det = g1.rotation[0] * g1.rotation[3] - g1.rotation[1] * g1.rotation[2];
    CHECK(std::abs(det - 1.0) < 1e-12);
    const Scene s = random_scene(config, rng);
    const Scene two_step = apply_se2(apply_se2(s, g1), g2);
    const Scene composed = apply_se2(s, g2.after(g1));
    CHECK(max_abs_diff(two_step.histories, composed.histories) < 1e-12 * 200.0);
    CHECK(max_abs_diff(two_step.map, composed.map) < 1e-12 * 200.0);
    const Scene back = apply_se2(apply_se2(s, g1), g1.inverse());
    CHECK(max_abs_diff(back.histories, s.histories) < 1e-12 * 200.0);
  }
}

TEST_CASE("apply_se2 keeps masks and zero padding")
{
  Rng rng(5);
  const Config config;
  Scene s = random_scene(config, rng);
  s.agent_mask[2] = false;
  for (std::size_t t = 0; t < config.t_in; ++t) {
    s.set_history(2, t, {0.0, 0.0});
  }
  const Scene moved = apply_se2(s, Se2Transform::from_angle(1.0, {10.0, 20.0}));
  CHECK(moved.agent_mask == s.agent_mask);
  CHECK(moved.lane_mask == s.lane_mask);
  CHECK(validate(moved, config).empty());
  CHECK(moved.history(2, 0) == Point{0.0, 0.0});
  CHECK(apply_se2(s, Se2Transform::identity()) == s);
}

TEST_CASE("constant velocity baseline examples")
{
  Config config = Config::tiny();
  Scene s = Scene::empty(config);
  s.agent_mask[0] = true;
  s.set_history(0, config.t_in - 2, {0.0, 0.0});
  s.set_history(0, config.t_in - 1, {1.0, 0.0});
  s.agent_mask[1] = true;
  for (std::size_t t = 0; t < config.t_in; ++t) {
    s.set_history(1, t, {4.0, 7.0});
  }
  const ForecastSet f = constant_velocity_baseline(s, 3);
  CHECK(f.heads() == 1);
  CHECK(f.point(0, 0, 0) == Point{2.0, 0.0});
  CHECK(f.point(0, 0, 1) == Point{3.0, 0.0});
  CHECK(f.point(0, 0, 2) == Point{4.0, 0.0});
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(f.point(1, 0, t) == Point{4.0, 7.0});
  }
  CHECK(f.probabilities[0] == 1.0);
  CHECK(validate(f).empty());
}

TEST_CASE("constant velocity baseline is equivariant")
{
  Rng rng(6);
  const Config config;
  for (int i = 0; i < 20; ++i) {
    const Scene s = random_scene(config, rng);
    const auto g = random_transform(rng);
    const auto direct = constant_velocity_baseline(apply_se2(s, g), config.t_out);
    const auto moved = apply_se2(constant_velocity_baseline(s, config.t_out), g);
    // Padded agents have no mask in a ForecastSet, so only valid rows are compared.
    for (std::size_t a = 0; a < config.agents; ++a) {
      if (!s.agent_mask[a]) {
        continue;
      }
      for (std::size_t t = 0; t < config.t_out; ++t) {
        CHECK(std::abs(direct.point(a, 0, t).x - moved.point(a, 0, t).x) < 1e-9);
        CHECK(std::abs(direct.point(a, 0, t).y - moved.point(a, 0, t).y) < 1e-9);
      }
    }
    CHECK(direct.probabilities == moved.probabilities);
  }
}

TEST_CASE("shape descriptors are lengths then turning angles")
{
  const std::vector<double> xy{0, 0, 1, 0, 1, 2, 1, 2};
  std::vector<double> out(5);
  shape_descriptors(xy, out);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 2.0);
  CHECK(out[2] == 0.0);
  CHECK(out[3] == doctest::Approx(std::numbers::pi / 2));
  CHECK(out[4] == 0.0);
  CHECK(turning_angle(1, 0, 0, -1) == doctest::Approx(-std::numbers::pi / 2));
}

TEST_CASE("configuration parsing")
{
  const Config c = parse_config("# comment\nT_in=8\n\nH = 3\nmap_mode=raw\nbeta=0.25\n");
  CHECK(c.t_in == 8);
  CHECK(c.heads == 3);
  CHECK(c.map_mode == MapMode::kRaw);
  CHECK(c.beta == 0.25);
  CHECK(c.t_out == Config{}.t_out);
  CHECK(parse_config(to_key_values(c)) == c);
  CHECK_THROWS_AS(parse_config("bogus=1"), ConfigError);
  CHECK_THROWS_AS(parse_config("beta=1.5"), ConfigError);
  CHECK_THROWS_AS(parse_config("H=0"), ConfigError);
  CHECK_THROWS_AS(parse_config("T_in"), ConfigError);
  CHECK_THROWS_AS(parse_config("map_mode=sideways"), ConfigError);
}

TEST_CASE("defaults match the full-size setting")
{
  const Config c;
  CHECK(c.t_in == 20);
  CHECK(c.t_out == 30);
  CHECK(c.heads == 6);
  CHECK(c.cycles == 20);
  CHECK(c.hidden == 64);
  CHECK(c.beta == 0.5);
  CHECK(c.learning_rate == 1e-5);
  CHECK(c.epochs == 50);
  CHECK(c.batch_size == 512);
  CHECK_NOTHROW(c.validate());
}
