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

#include "eqf/predictor.hpp"

#include <algorithm>
#include <cmath>

namespace eqf
{

namespace
{

constexpr std::size_t kDecoderLayers = 4;
/// Largest lateral bend of the initial head anchors, per squared step, relative to the mean step.
constexpr double kAnchorBend = 0.01;
constexpr double kGateInitScale = 0.01;

/// Lateral bend of head `h` at initialization, spread evenly from left to right.
double anchor_bend(std::size_t h, std::size_t heads)
{
  if (heads == 1) {
    return 0.0;
  }
  return kAnchorBend * (1.0 - 2.0 * static_cast<double>(h) / static_cast<double>(heads - 1));
}

/**
 * Makes the last mix extrapolate the final history step with the mean
 * velocity over the whole window, bent sideways by `bend` k^2 times that
 * velocity at future step k. The long baseline keeps every coefficient small,
 * so drift of individual channels is not amplified. Both terms act on
 * channels that the near-identity inner layers pass through.
 */
void add_anchor(ChannelMix & mix, std::size_t history, double bend)
{
  if (history < 2) {
    return;
  }
  auto & aligned = mix.aligned.mutable_leaf_value();
  auto & turned = mix.turned.mutable_leaf_value();
  const std::size_t last = history - 1;
  if (last >= aligned.dim(0)) {
    return;
  }
  const double span = static_cast<double>(last);
  for (std::size_t t = 0; t < aligned.dim(1); ++t) {
    const double k = static_cast<double>(t + 1);
    aligned.at({last, t}) += 1.0 + k / span;
    aligned.at({0, t}) -= k / span;
    turned.at({last, t}) += bend * k * k / span;
    turned.at({0, t}) -= bend * k * k / span;
  }
}

HeadParams make_head(ParamStore & store, Rng & rng, const Config & config, std::size_t h)
{
  const std::string name = "decoder.head" + std::to_string(h);
  const std::size_t w = config.hidden;
  const std::vector<std::size_t> widths{config.channels(), w, w, w, config.t_out};
  HeadParams head;
  for (std::size_t l = 0; l < kDecoderLayers; ++l) {
    const bool last = l + 1 == kDecoderLayers;
    head.mixes.push_back(make_channel_mix(
      store, rng, name + ".mix" + std::to_string(l), widths[l], widths[l + 1],
      last ? MixInit::kSmall : MixInit::kNearIdentity));
    if (!last) {
      auto gate =
        make_linear(store, rng, name + ".gate" + std::to_string(l), config.hidden + widths[l + 1], widths[l + 1]);
      for (auto * v : {&gate.weight, &gate.bias}) {
        for (double & x : v->mutable_leaf_value().data()) {
          x *= kGateInitScale;
        }
      }
      head.gates.push_back(std::move(gate));
    }
  }
  add_anchor(head.mixes.back(), config.channels(), anchor_bend(h, config.heads));
  return head;
}

}  // namespace

nd::Var decode_head(const nd::Var & geometric, const nd::Var & pattern, const HeadParams & head)
{
  const auto center = channel_mean(geometric);
  nd::Var z = geometric - center;
  for (std::size_t l = 0; l < head.mixes.size(); ++l) {
    z = head.mixes[l](z);
    if (l < head.gates.size()) {
      const auto logits = head.gates[l](nd::concat({pattern, channel_norms(z)}, 1));
      const auto gate = nd::affine(nd::sigmoid(logits), 2.0);
      z = nd::reshape(gate, {gate.dim(0), 1, gate.dim(1)}) * z;
    }
  }
  return nd::transpose(z + center, {0, 2, 1});
}

nd::Array probability_features(const nd::Array & trajectories)
{
  const std::size_t rows = trajectories.dim(0);
  const std::size_t heads = trajectories.dim(1);
  const std::size_t steps = trajectories.dim(2);
  const std::size_t width = 2 * steps;
  nd::Array out({rows * heads, 2 * width});
  const auto & y = trajectories.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double * base = y.data() + r * heads * width;
    double cx = 0.0;
    double cy = 0.0;
    double rx = 0.0;
    double ry = 0.0;
    for (std::size_t h = 0; h < heads; ++h) {
      const double * traj = base + h * width;
      for (std::size_t t = 0; t < steps; ++t) {
        cx += traj[2 * t];
        cy += traj[2 * t + 1];
      }
      rx += traj[width - 2] - traj[0];
      ry += traj[width - 1] - traj[1];
    }
    const double n = static_cast<double>(heads * steps);
    cx /= n;
    cy /= n;
    const double len = std::hypot(rx, ry);
    const double ux = len > 0.0 ? rx / len : 1.0;
    const double uy = len > 0.0 ? ry / len : 0.0;

    std::vector<double> mean(width, 0.0);
    for (std::size_t h = 0; h < heads; ++h) {
      const double * traj = base + h * width;
      double * row = out.data().data() + (r * heads + h) * 2 * width;
      for (std::size_t t = 0; t < steps; ++t) {
        const double vx = traj[2 * t] - cx;
        const double vy = traj[2 * t + 1] - cy;
        row[2 * t] = ux * vx + uy * vy;
        row[2 * t + 1] = -uy * vx + ux * vy;
        mean[2 * t] += row[2 * t] / static_cast<double>(heads);
        mean[2 * t + 1] += row[2 * t + 1] / static_cast<double>(heads);
      }
    }
    for (std::size_t h = 0; h < heads; ++h) {
      double * row = out.data().data() + (r * heads + h) * 2 * width;
      std::copy(mean.begin(), mean.end(), row + width);
    }
  }
  return out;
}

nd::Var estimate_probabilities(const nd::Var & trajectories, const ProbabilityParams & params)
{
  const auto frozen = nd::detach(trajectories);
  const std::size_t rows = frozen.dim(0);
  const std::size_t heads = frozen.dim(1);
  const auto logits = params.scorer(nd::Var::constant(probability_features(frozen.value())));
  return nd::softmax(nd::reshape(logits, {rows, heads}));
}

Model::Model(const Config & config) : config_(config)
{
  config_.validate();
  Rng rng(config_.seed);
  map_encoder_ = MapEncoder(store_, rng, config_);
  backbone_ = BackboneParams::create(store_, rng, config_);
  for (std::size_t h = 0; h < config_.heads; ++h) {
    heads_.push_back(make_head(store_, rng, config_, h));
  }
  const std::size_t in = 4 * config_.t_out;
  probability_.scorer = make_mlp(store_, rng, "probability.scorer", {in, config_.hidden, config_.hidden, 1});
}

std::vector<nd::Var> Model::trajectory_params() const
{
  std::vector<nd::Var> out;
  for (const auto & e : store_.entries()) {
    if (!e.name.starts_with("probability.")) {
      out.push_back(e.var);
    }
  }
  return out;
}

ModelOutput Model::forward(const SceneBatch & batch) const
{
  if (batch.agents != config_.agents || batch.t_in != config_.t_in || batch.lanes != config_.lanes ||
      batch.lane_points != config_.lane_points) {
    throw InvalidScene({{
      "batch dimensions (A=" + std::to_string(batch.agents) + ", T_in=" + std::to_string(batch.t_in) +
        ", L=" + std::to_string(batch.lanes) + ", K=" + std::to_string(batch.lane_points) +
        ") do not match the model configuration",
      {}}});
  }
  ModelOutput out;
  out.map = map_encoder_.encode(batch);
  out.backbone = run_backbone(batch, out.map.feature, backbone_);
  const std::size_t rows = batch.rows();
  std::vector<nd::Var> heads;
  for (const auto & head : heads_) {
    const auto traj = decode_head(out.backbone.geometric, out.backbone.pattern, head);
    heads.push_back(nd::reshape(traj, {rows, 1, config_.t_out, 2}));
  }
  out.trajectories = nd::concat(heads, 1);
  out.probabilities = estimate_probabilities(out.trajectories, probability_);
  return out;
}

std::vector<ForecastSet> to_forecasts(const ModelOutput & output, const SceneBatch & batch)
{
  const auto & traj = output.trajectories.value();
  const auto & prob = output.probabilities.value();
  const std::size_t heads = traj.dim(1);
  const std::size_t steps = traj.dim(2);
  const std::size_t traj_stride = batch.agents * heads * steps * 2;
  const std::size_t prob_stride = batch.agents * heads;
  std::vector<ForecastSet> out;
  for (std::size_t s = 0; s < batch.scenes; ++s) {
    ForecastSet f;
    f.trajectories = nd::Array(
      {batch.agents, heads, steps, 2},
      std::vector<double>(traj.data().begin() + s * traj_stride, traj.data().begin() + (s + 1) * traj_stride));
    f.probabilities = nd::Array(
      {batch.agents, heads},
      std::vector<double>(prob.data().begin() + s * prob_stride, prob.data().begin() + (s + 1) * prob_stride));
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<ForecastSet> forecast(const Model & model, std::span<const Scene> scenes)
{
  for (const auto & s : scenes) {
    const auto violations = validate(s, model.config());
    if (!violations.empty()) {
      throw InvalidScene(violations);
    }
  }
  const auto batch = SceneBatch::from(scenes);
  return to_forecasts(model.forward(batch), batch);
}

ForecastSet forecast(const Model & model, const Scene & scene)
{
  return forecast(model, std::span<const Scene>(&scene, 1)).front();
}

std::vector<Selection> select_trajectory(const ForecastSet & forecast)
{
  const auto best = nd::argmax(forecast.probabilities, 1);
  std::vector<Selection> out;
  for (std::size_t a = 0; a < forecast.agents(); ++a) {
    Selection s;
    s.head = best[a];
    s.probability = forecast.probabilities.at({a, s.head});
    for (std::size_t t = 0; t < forecast.t_out(); ++t) {
      s.trajectory.push_back(forecast.point(a, s.head, t));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace eqf
