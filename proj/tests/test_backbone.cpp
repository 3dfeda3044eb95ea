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


#include "eqf/backbone.hpp"
#include "eqf/map_encoder.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace eqf;
using eqf::testing::max_abs_diff;
using eqf::testing::random_scene;
using eqf::testing::random_transform;
using eqf::testing::relative_error;

namespace
{

Config backbone_config(MapMode mode = MapMode::kInvariant)
{
  Config c;
  c.agents = 4;
  c.t_in = 6;
  c.hidden = 12;
  c.cycles = 3;
  c.lanes = 3;
  c.lane_points = 8;
  c.map_mode = mode;
  return c;
}

struct Fixture
{
  explicit Fixture(const Config & c, std::uint64_t seed = 1) : config(c), rng(seed)
  {
    encoder = MapEncoder(store, rng, config);
    params = BackboneParams::create(store, rng, config);
  }

  BackboneOutput run(const Scene & scene) const
  {
    const auto batch = SceneBatch::from(std::vector<Scene>{scene});
    return run_backbone(batch, encoder.encode(batch).feature, params);
  }

  Config config;
  Rng rng;
  ParamStore store;
  MapEncoder encoder;
  BackboneParams params;
};

void zero(nd::Var v)
{
  for (double & x : v.mutable_leaf_value().data()) {
    x = 0.0;
  }
}

void set_identity(nd::Var v)
{
  zero(v);
  auto & a = v.mutable_leaf_value();
  for (std::size_t i = 0; i < std::min(a.dim(0), a.dim(1)); ++i) {
    a.at({i, i}) = 1.0;
  }
}

void perturb(nd::Var v, Rng & rng)
{
  for (double & x : v.mutable_leaf_value().data()) {
    x += rng.uniform(-0.5, 0.5);
  }
}

/// Applies g to every channel of every row of a [rows, 2, C] feature.
nd::Array transform_rows(const nd::Array & geometric, const Se2Transform & g)
{
  nd::Array out = geometric;
  for (std::size_t r = 0; r < geometric.dim(0); ++r) {
    for (std::size_t k = 0; k < geometric.dim(2); ++k) {
      const Point p = g.apply({geometric.at({r, 0, k}), geometric.at({r, 1, k})});
      out.at({r, 0, k}) = p.x;
      out.at({r, 1, k}) = p.y;
    }
  }
  return out;
}

/// Rows of valid agents, flattened, in `order`.
nd::Array pick_rows(const nd::Array & a, const std::vector<std::size_t> & order)
{
  const std::size_t width = a.size() / a.dim(0);
  std::vector<double> out;
  for (std::size_t r : order) {
    for (std::size_t i = 0; i < width; ++i) {
      out.push_back(a[r * width + i]);
    }
  }
  return nd::Array({out.size()}, out);
}

std::vector<std::size_t> valid_rows(const Scene & s)
{
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < s.agents(); ++a) {
    if (s.agent_mask[a]) {
      out.push_back(a);
    }
  }
  return out;
}

void clear_agent(Scene & s, std::size_t a)
{
  s.agent_mask[a] = false;
  for (std::size_t t = 0; t < s.t_in(); ++t) {
    s.set_history(a, t, {0.0, 0.0});
  }
}

}  // namespace

TEST_CASE("stationary agent has every initial channel at its position")
{
  const Config config = backbone_config();
  Fixture fx(config);
  Scene s = Scene::empty(config);
  s.agent_mask[0] = true;
  for (std::size_t t = 0; t < config.t_in; ++t) {
    s.set_history(0, t, {2.0, 3.0});
  }
  const auto g0 = init_features(SceneBatch::from(std::vector<Scene>{s}), fx.params).geometric.value();
  REQUIRE(g0.shape() == nd::Shape{config.agents, 2, config.channels()});
  for (std::size_t k = 0; k < config.channels(); ++k) {
    CHECK(g0.at({0, 0, k}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g0.at({0, 1, k}) == doctest::Approx(3.0).epsilon(1e-15));
  }
}

TEST_CASE("straight constant-speed motion has zero turning angles")
{
  const Config config = backbone_config();
  Scene s = Scene::empty(config);
  s.agent_mask[0] = true;
  for (std::size_t t = 0; t < config.t_in; ++t) {
    s.set_history(0, t, {1.0 + 0.6 * static_cast<double>(t), -2.0 + 0.8 * static_cast<double>(t)});
  }
  const auto inv = history_invariants(SceneBatch::from(std::vector<Scene>{s}));
  for (std::size_t i = 0; i < config.t_in - 1; ++i) {
    CHECK(inv.at({0, i}) == doctest::Approx(1.0));
  }
  for (std::size_t i = config.t_in - 1; i < 2 * config.t_in - 3; ++i) {
    CHECK(std::abs(inv.at({0, i})) < 1e-12);
  }
}

TEST_CASE("initial features transform with the scene")
{
  const Config config = backbone_config();
  Fixture fx(config);
  Rng data(2);
  for (int i = 0; i < 10; ++i) {
    const Scene s = random_scene(config, data);
    const auto g = random_transform(data);
    const auto f0 = init_features(SceneBatch::from(std::vector<Scene>{s}), fx.params);
    const auto f1 = init_features(SceneBatch::from(std::vector<Scene>{apply_se2(s, g)}), fx.params);
    const auto rows = valid_rows(s);
    CHECK(max_abs_diff(pick_rows(f1.geometric.value(), rows), pick_rows(transform_rows(f0.geometric.value(), g), rows)) < 1e-9);
    CHECK(max_abs_diff(f1.pattern.value(), f0.pattern.value()) < 1e-9);
  }
}

TEST_CASE("fused features have hidden width and equal rows for equal histories")
{
  const Config config = backbone_config();
  Fixture fx(config);
  Rng data(3);
  Scene s = random_scene(config, data, true);
  for (std::size_t t = 0; t < config.t_in; ++t) {
    const Point p = s.history(0, t);
    s.set_history(1, t, {p.x + 5.0, p.y - 7.0});
  }
  const auto batch = SceneBatch::from(std::vector<Scene>{s});
  const auto init = init_features(batch, fx.params);
  const auto fused = fuse_map(init.pattern, fx.encoder.encode(batch).feature, batch, fx.params).value();
  REQUIRE(fused.shape() == nd::Shape{config.agents, config.hidden});
  for (std::size_t j = 0; j < config.hidden; ++j) {
    CHECK(std::abs(fused.at({0, j}) - fused.at({1, j})) < 1e-12);
  }
}

TEST_CASE("fusion ignores the map when the map block of its weights is zero")
{
  const Config config = backbone_config();
  Fixture fx(config);
  nd::Var w = fx.params.fuse.layers[0].weight;
  auto & wa = w.mutable_leaf_value();
  for (std::size_t i = config.hidden; i < 2 * config.hidden; ++i) {
    for (std::size_t j = 0; j < config.hidden; ++j) {
      wa.at({i, j}) = 0.0;
    }
  }
  Rng data(4);
  const auto batch = SceneBatch::from(std::vector<Scene>{random_scene(config, data)});
  const auto init = init_features(batch, fx.params);
  const auto with_map = fuse_map(init.pattern, fx.encoder.encode(batch).feature, batch, fx.params).value();
  const auto without =
    fuse_map(init.pattern, nd::Var::constant(nd::Array({1, config.hidden})), batch, fx.params).value();
  CHECK(with_map == without);
}

TEST_CASE("edge weights: single agent, symmetric pair and padding")
{
  const Config config = backbone_config();
  Fixture fx(config);
  Rng data(5);

  Scene lone = random_scene(config, data, true);
  for (std::size_t a = 1; a < config.agents; ++a) {
    clear_agent(lone, a);
  }
  const auto e_lone = fx.run(lone).edges.value();
  for (double v : e_lone.data()) {
    CHECK(v == 0.0);
  }

  Scene twin = random_scene(config, data, true);
  for (std::size_t t = 0; t < config.t_in; ++t) {
    const Point p = twin.history(0, t);
    twin.set_history(1, t, {p.x + 3.0, p.y + 4.0});
  }
  const auto e = fx.run(twin).edges.value();
  CHECK(std::abs(e.at({0, 1}) - e.at({1, 0})) < 1e-12);
  CHECK(e.at({0, 0}) == 0.0);
  CHECK(e.at({1, 1}) == 0.0);
  CHECK(e.at({0, 1}) > 0.0);

  Scene padded = random_scene(config, data, true);
  clear_agent(padded, 2);
  const auto ep = fx.run(padded).edges.value();
  for (std::size_t a = 0; a < config.agents; ++a) {
    CHECK(ep.at({a, 2}) == 0.0);
    CHECK(ep.at({2, a}) == 0.0);
  }
}

TEST_CASE("geometric layer with identity mix, no interaction and unit gate is the identity")
{
  const Config config = backbone_config();
  Fixture fx(config);
  const CycleParams & cycle = fx.params.cycles[0];
  set_identity(cycle.self_mix.aligned);
  zero(cycle.self_mix.turned);
  zero(cycle.interaction_mix.aligned);
  zero(cycle.interaction_mix.turned);
  zero(cycle.gate.layers.back().weight);
  zero(cycle.gate.layers.back().bias);
  Rng data(6);
  const auto batch = SceneBatch::from(std::vector<Scene>{random_scene(config, data, true)});
  const auto init = init_features(batch, fx.params);
  const auto edges = edge_weights(init.geometric, init.pattern, batch, fx.params);
  const auto out = geometric_layer(init.geometric, init.pattern, edges, batch, cycle);
  CHECK(max_abs_diff(out.value(), init.geometric.value()) < 1e-12);
}

TEST_CASE("coincident agents keep every channel at the common point")
{
  const Config config = backbone_config();
  Fixture fx(config);
  Scene s = Scene::empty(config);
  for (std::size_t a = 0; a < config.agents; ++a) {
    s.agent_mask[a] = true;
    for (std::size_t t = 0; t < config.t_in; ++t) {
      s.set_history(a, t, {-4.0, 9.0});
    }
  }
  const auto g = fx.run(s).geometric.value();
  for (std::size_t a = 0; a < config.agents; ++a) {
    for (std::size_t k = 0; k < config.channels(); ++k) {
      CHECK(g.at({a, 0, k}) == doctest::Approx(-4.0).epsilon(1e-14));
      CHECK(g.at({a, 1, k}) == doctest::Approx(9.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("pattern layer with a zero update is the residual identity")
{
  const Config config = backbone_config();
  Fixture fx(config);
  const CycleParams & cycle = fx.params.cycles[0];
  zero(cycle.update.layers.back().weight);
  zero(cycle.update.layers.back().bias);
  Rng data(7);
  const auto batch = SceneBatch::from(std::vector<Scene>{random_scene(config, data)});
  const auto init = init_features(batch, fx.params);
  CHECK(pattern_layer(init.geometric, init.pattern, batch, cycle).value() == init.pattern.value());
}

TEST_CASE("a single valid agent receives an empty neighbour aggregate")
{
  const Config config = backbone_config();
  Fixture fx(config);
  Rng data(8);
  Scene lone = random_scene(config, data, true);
  for (std::size_t a = 1; a < config.agents; ++a) {
    clear_agent(lone, a);
  }
  const auto batch = SceneBatch::from(std::vector<Scene>{lone});
  const auto init = init_features(batch, fx.params);
  const CycleParams & cycle = fx.params.cycles[0];
  const auto before = pattern_layer(init.geometric, init.pattern, batch, cycle).value();
  for (const auto & layer : cycle.neighbor.layers) {
    perturb(layer.weight, data);
    perturb(layer.bias, data);
  }
  CHECK(pattern_layer(init.geometric, init.pattern, batch, cycle).value() == before);
  CHECK(before.all_finite());
}

TEST_CASE("one cycle equals one manual layer application")
{
  Config config = backbone_config();
  config.cycles = 1;
  Fixture fx(config);
  Rng data(9);
  const Scene s = random_scene(config, data);
  const auto batch = SceneBatch::from(std::vector<Scene>{s});
  const auto map = fx.encoder.encode(batch).feature;
  const auto init = init_features(batch, fx.params);
  const auto h0 = fuse_map(init.pattern, map, batch, fx.params);
  const auto e = edge_weights(init.geometric, h0, batch, fx.params);
  const auto g1 = geometric_layer(init.geometric, h0, e, batch, fx.params.cycles[0]);
  const auto h1 = pattern_layer(init.geometric, h0, batch, fx.params.cycles[0]);
  const auto out = run_backbone(batch, map, fx.params);
  CHECK(out.geometric.value() == g1.value());
  CHECK(out.pattern.value() == h1.value());
  CHECK(out.edges.value() == e.value());
}

TEST_CASE("full-depth backbone keeps shapes and stays finite")
{
  Config config;
  config.lanes = 4;
  config.lane_points = 20;
  Fixture fx(config);
  Rng data(10);
  for (int i = 0; i < 3; ++i) {
    const auto out = fx.run(random_scene(config, data));
    CHECK(out.geometric.shape() == nd::Shape{config.agents, 2, config.channels()});
    CHECK(out.pattern.shape() == nd::Shape{config.agents, config.hidden});
    CHECK(out.geometric.value().all_finite());
    CHECK(out.pattern.value().all_finite());
    CHECK(out.edges.value().all_finite());
  }
}

TEST_CASE("backbone geometry is equivariant and patterns and edges are invariant")
{
  for (MapMode mode : {MapMode::kNone, MapMode::kInvariant}) {
    const Config config = backbone_config(mode);
    Fixture fx(config, 11);
    Rng data(12);
    for (int i = 0; i < 5; ++i) {
      const Scene s = random_scene(config, data);
      const auto rows = valid_rows(s);
      const auto base = fx.run(s);
      for (int j = 0; j < 4; ++j) {
        const auto g = random_transform(data);
        const auto moved = fx.run(apply_se2(s, g));
        const auto expected = pick_rows(transform_rows(base.geometric.value(), g), rows);
        CHECK(relative_error(pick_rows(moved.geometric.value(), rows), expected) < 1e-6);
        CHECK(relative_error(moved.pattern.value(), base.pattern.value()) < 1e-6);
        CHECK(relative_error(moved.edges.value(), base.edges.value()) < 1e-6);
      }
    }
  }
}

TEST_CASE("permuting agent slots permutes the outputs")
{
  const Config config = backbone_config();
  Fixture fx(config);
  Rng data(13);
  const Scene s = random_scene(config, data, true);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  Scene p = s;
  for (std::size_t a = 0; a < config.agents; ++a) {
    for (std::size_t t = 0; t < config.t_in; ++t) {
      p.set_history(a, t, s.history(perm[a], t));
    }
  }
  const auto base = fx.run(s);
  const auto permuted = fx.run(p);
  CHECK(relative_error(permuted.geometric.value().reshaped({config.agents * 2 * config.channels()}),
                       pick_rows(base.geometric.value(), perm)) <= 1e-12);
  CHECK(relative_error(permuted.pattern.value().reshaped({config.agents * config.hidden}),
                       pick_rows(base.pattern.value(), perm)) <= 1e-12);
}

TEST_CASE("padded agent slots do not influence valid agents")
{
  const Config wide = backbone_config();
  Config narrow = wide;
  narrow.agents = wide.agents - 1;
  // Backbone parameter shapes do not depend on A, so equal seeds give equal weights.
  Fixture fw(wide, 14);
  Fixture fn(narrow, 14);
  Rng data(15);
  const Scene small = random_scene(narrow, data, true);
  Scene big = Scene::empty(wide);
  big.map = small.map;
  big.lane_mask = small.lane_mask;
  for (std::size_t a = 0; a < narrow.agents; ++a) {
    big.agent_mask[a] = true;
    for (std::size_t t = 0; t < wide.t_in; ++t) {
      big.set_history(a, t, small.history(a, t));
    }
  }
  const std::vector<std::size_t> rows{0, 1, 2};
  const auto ow = fw.run(big);
  const auto on = fn.run(small);
  CHECK(relative_error(pick_rows(ow.geometric.value(), rows), pick_rows(on.geometric.value(), rows)) <= 1e-12);
  CHECK(relative_error(pick_rows(ow.pattern.value(), rows), pick_rows(on.pattern.value(), rows)) <= 1e-12);
}
