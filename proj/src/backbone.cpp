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

#include "eqf/geometry.hpp"

namespace eqf
{

BackboneParams BackboneParams::create(ParamStore & store, Rng & rng, const Config & config)
{
  const std::size_t d = config.hidden;
  const std::size_t c = config.channels();
  BackboneParams p;
  p.init_mix = make_channel_mix(store, rng, "backbone.init.mix", config.t_in, c, MixInit::kNearIdentity);
  p.pattern_init = make_mlp(store, rng, "backbone.init.pattern", {2 * config.t_in - 3, d, d});
  p.fuse = make_mlp(store, rng, "backbone.fuse", {2 * d, d, d});
  p.edge = make_mlp(store, rng, "backbone.edge", {2 * d + 1, d, 1});
  for (std::size_t q = 0; q < config.cycles; ++q) {
    const std::string name = "backbone.cycle" + std::to_string(q);
    CycleParams cp;
    cp.self_mix = make_channel_mix(store, rng, name + ".self_mix", c, c, MixInit::kNearIdentity);
    cp.interaction_mix = make_channel_mix(store, rng, name + ".interaction_mix", c, c, MixInit::kSmall);
    cp.gate = make_mlp(store, rng, name + ".gate", {d + c, d, d, c});
    cp.neighbor = make_mlp(store, rng, name + ".neighbor", {d + 1, d, d, d});
    cp.update = make_mlp(store, rng, name + ".update", {2 * d + c, d, d, d});
    p.cycles.push_back(std::move(cp));
  }
  return p;
}

nd::Array history_invariants(const SceneBatch & batch)
{
  const std::size_t width = 2 * batch.t_in - 3;
  nd::Array out({batch.rows(), width});
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    if (!batch.agent_mask[r]) {
      continue;
    }
    shape_descriptors(
      batch.histories.data().subspan(r * batch.t_in * 2, batch.t_in * 2), out.data().subspan(r * width, width));
  }
  return out;
}

namespace
{

/// Positive per-channel gate in (0, 2), equal to 1 when the MLP outputs 0.
nd::Var positive_gate(const Mlp & mlp, const nd::Var & pattern, const nd::Var & centered)
{
  const auto logits = mlp(nd::concat({pattern, channel_norms(centered)}, 1));
  const auto gate = nd::affine(nd::sigmoid(logits), 2.0);
  return nd::reshape(gate, {gate.dim(0), 1, gate.dim(1)});
}

/// Distance between the channel means of every row and its scene's slot k: [rows, 1].
nd::Var slot_distance(const nd::Var & centers, const SceneBatch & batch, std::size_t k)
{
  const auto diff = centers - nd::gather_rows(centers, batch.slot_rows(k));
  return nd::reshape(nd::l2_norm(diff), {batch.rows(), 1});
}

nd::Var flat_centers(const nd::Var & geometric)
{
  return nd::reshape(channel_mean(geometric), {geometric.dim(0), 2});
}

}  // namespace

GeometricPattern init_features(const SceneBatch & batch, const BackboneParams & params)
{
  const auto history = nd::transpose(nd::Var::constant(batch.histories), {0, 2, 1});
  const auto center = channel_mean(history);
  GeometricPattern out;
  out.geometric = params.init_mix(history - center) + center;
  const auto mask = nd::Var::constant(batch.row_mask());
  out.pattern = params.pattern_init(nd::Var::constant(history_invariants(batch))) * mask;
  return out;
}

nd::Var fuse_map(const nd::Var & pattern, const nd::Var & map_feature, const SceneBatch & batch, const BackboneParams & params)
{
  const auto per_agent = nd::gather_rows(map_feature, batch.scene_rows());
  const auto mask = nd::Var::constant(batch.row_mask());
  return params.fuse(nd::concat({pattern, per_agent}, 1)) * mask;
}

nd::Var edge_weights(const nd::Var & geometric, const nd::Var & pattern, const SceneBatch & batch, const BackboneParams & params)
{
  const std::size_t rows = batch.rows();
  const auto centers = flat_centers(geometric);
  std::vector<nd::Var> pairs;
  for (std::size_t k = 0; k < batch.agents; ++k) {
    pairs.push_back(nd::concat(
      {pattern, nd::gather_rows(pattern, batch.slot_rows(k)), slot_distance(centers, batch, k)}, 1));
  }
  const auto logits = params.edge(nd::concat(pairs, 0));
  const auto weights = nd::transpose(nd::reshape(nd::sigmoid(logits), {batch.agents, rows}), {1, 0});
  return weights * nd::Var::constant(batch.pair_mask());
}

nd::Var geometric_layer(
  const nd::Var & geometric, const nd::Var & pattern, const nd::Var & edges, const SceneBatch & batch,
  const CycleParams & params)
{
  const std::size_t rows = batch.rows();
  const auto center = channel_mean(geometric);
  const auto centered = geometric - center;
  nd::Var mixed = params.self_mix(centered);
  for (std::size_t k = 0; k < batch.agents; ++k) {
    const auto relative = nd::gather_rows(geometric, batch.slot_rows(k)) - center;
    const auto weight = nd::reshape(nd::slice(edges, 1, k, 1), {rows, 1, 1});
    mixed = mixed + weight * params.interaction_mix(relative);
  }
  return positive_gate(params.gate, pattern, centered) * mixed + center;
}

nd::Var pattern_layer(
  const nd::Var & geometric, const nd::Var & pattern, const SceneBatch & batch, const CycleParams & params)
{
  const std::size_t rows = batch.rows();
  const std::size_t agents = batch.agents;
  const auto centers = flat_centers(geometric);
  const auto norms = channel_norms(geometric - channel_mean(geometric));

  std::vector<nd::Var> inputs;
  for (std::size_t k = 0; k < agents; ++k) {
    inputs.push_back(nd::concat({nd::gather_rows(pattern, batch.slot_rows(k)), slot_distance(centers, batch, k)}, 1));
  }
  const auto messages = params.neighbor(nd::concat(inputs, 0));
  const std::size_t width = messages.dim(1);

  // Mean over valid neighbours; the empty mean is the zero vector.
  const nd::Array pairs = batch.pair_mask();
  nd::Array weights({agents, rows, 1});
  for (std::size_t r = 0; r < rows; ++r) {
    double count = 0.0;
    for (std::size_t k = 0; k < agents; ++k) {
      count += pairs[r * agents + k];
    }
    for (std::size_t k = 0; k < agents; ++k) {
      weights[k * rows + r] = count > 0.0 ? pairs[r * agents + k] / count : 0.0;
    }
  }
  const auto aggregate =
    nd::sum(nd::reshape(messages, {agents, rows, width}) * nd::Var::constant(std::move(weights)), 0);

  const auto mask = nd::Var::constant(batch.row_mask());
  return pattern + params.update(nd::concat({pattern, aggregate, norms}, 1)) * mask;
}

BackboneOutput run_backbone(const SceneBatch & batch, const nd::Var & map_feature, const BackboneParams & params)
{
  BackboneOutput out;
  out.initial = init_features(batch, params);
  out.initial.pattern = fuse_map(out.initial.pattern, map_feature, batch, params);
  out.edges = edge_weights(out.initial.geometric, out.initial.pattern, batch, params);
  nd::Var g = out.initial.geometric;
  nd::Var h = out.initial.pattern;
  for (const auto & cycle : params.cycles) {
    const auto next_g = geometric_layer(g, h, out.edges, batch, cycle);
    const auto next_h = pattern_layer(g, h, batch, cycle);
    g = next_g;
    h = next_h;
  }
  out.geometric = g;
  out.pattern = h;
  return out;
}

}  // namespace eqf
