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

#include "eqf/data/generator.hpp"

#include "eqf/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eqf::data
{

namespace
{

constexpr double kLaneWidth = 3.5;
constexpr double kLaneMargin = 10.0;

struct Neighbor
{
  Point start;
  double heading{0.0};
  double speed{0.0};
};

Neighbor sample_neighbor(Rng & rng, double ego_speed)
{
  constexpr double kPi = std::numbers::pi;
  Neighbor n;
  n.speed = ego_speed * rng.uniform(0.6, 1.4);
  const double side = rng.below(2) == 0 ? 1.0 : -1.0;
  switch (rng.below(3)) {
    case 0:  // same direction, adjacent lane
      n.start = {rng.uniform(-20.0, 20.0), side * kLaneWidth};
      n.heading = 0.0;
      break;
    case 1:  // oncoming
      n.start = {rng.uniform(30.0, 70.0), side * kLaneWidth};
      n.heading = kPi;
      break;
    default:  // crossing
      n.start = {rng.uniform(20.0, 50.0), -side * rng.uniform(15.0, 35.0)};
      n.heading = side * kPi / 2.0;
      break;
  }
  return n;
}

Point along(const Neighbor & n, double s)
{
  return {n.start.x + s * std::cos(n.heading), n.start.y + s * std::sin(n.heading)};
}

}  // namespace

const char * to_string(ScenarioKind kind)
{
  switch (kind) {
    case ScenarioKind::kStraight:
      return "straight";
    case ScenarioKind::kLeftTurn:
      return "left-turn";
    case ScenarioKind::kRightTurn:
      return "right-turn";
    case ScenarioKind::kFork:
      return "fork";
  }
  return "?";
}

ScenarioKind parse_scenario_kind(const std::string & text)
{
  for (auto k : {ScenarioKind::kStraight, ScenarioKind::kLeftTurn, ScenarioKind::kRightTurn, ScenarioKind::kFork}) {
    if (text == to_string(k)) {
      return k;
    }
  }
  throw std::invalid_argument("unknown scenario kind '" + text + "' (straight, left-turn, right-turn, fork)");
}

void ScenarioSpec::validate() const
{
  if (modes == 0) {
    throw std::invalid_argument("scenario: mode count must be at least 1");
  }
  if (!(noise >= 0.0) || !(speed >= 0.0) || !(speed_jitter >= 0.0)) {
    throw std::invalid_argument("scenario: noise, speed and speed jitter must be non-negative");
  }
  if (!(turn_radius > 0.0)) {
    throw std::invalid_argument("scenario: turn radius must be positive");
  }
  if (!(turn_offset_min <= turn_offset_max)) {
    throw std::invalid_argument("scenario: turn offset range is empty");
  }
}

std::vector<double> mode_curvatures(const ScenarioSpec & spec)
{
  const double k = 1.0 / spec.turn_radius;
  switch (spec.kind) {
    case ScenarioKind::kStraight:
      return {0.0};
    case ScenarioKind::kLeftTurn:
      return {k};
    case ScenarioKind::kRightTurn:
      return {-k};
    case ScenarioKind::kFork:
      break;
  }
  if (spec.modes == 1) {
    return {0.0};
  }
  std::vector<double> out;
  for (std::size_t m = 0; m < spec.modes; ++m) {
    out.push_back(k * (1.0 - 2.0 * static_cast<double>(m) / static_cast<double>(spec.modes - 1)));
  }
  return out;
}

Point path_point(double s, double turn_start, double kappa)
{
  if (s <= turn_start || kappa == 0.0) {
    return {s, 0.0};
  }
  const double u = s - turn_start;
  return {turn_start + std::sin(kappa * u) / kappa, (1.0 - std::cos(kappa * u)) / kappa};
}

std::vector<GeneratedScene> generate_scenes(
  const ScenarioSpec & spec, const Config & config, std::size_t n, std::uint64_t seed)
{
  spec.validate();
  config.validate();
  if (n == 0) {
    throw std::invalid_argument("generate_scenes: n must be at least 1");
  }
  const std::size_t t_in = config.t_in;
  const std::size_t t_out = config.t_out;
  const std::size_t steps = t_in + t_out;
  const double dt = 1.0 / config.sample_rate_hz;
  const auto curvatures = mode_curvatures(spec);
  const std::size_t k_points = config.lane_points;

  Rng rng(seed);
  std::vector<GeneratedScene> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    GeneratedScene g;
    g.mode = curvatures.size() == 1 ? 0 : rng.below(curvatures.size());
    const double kappa = curvatures[g.mode];
    const double speed = spec.speed * (1.0 + rng.uniform(-spec.speed_jitter, spec.speed_jitter));
    const double step = speed * dt;
    const double turn_start = step * static_cast<double>(t_in - 1) + rng.uniform(spec.turn_offset_min, spec.turn_offset_max);
    const auto frame = Se2Transform::from_angle(
      rng.uniform(-std::numbers::pi, std::numbers::pi), {rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0)});

    std::vector<Neighbor> neighbors(config.agents > 1 ? rng.below(config.agents) : 0);
    for (auto & nb : neighbors) {
      nb = sample_neighbor(rng, spec.speed);
    }

    Scene scene = Scene::empty(config);
    GroundTruth truth = GroundTruth::empty(config);
    auto emit = [&](std::size_t agent, std::size_t t, Point local) {
      Point p = frame.apply(local);
      if (spec.noise > 0.0) {
        p.x += spec.noise * rng.normal();
        p.y += spec.noise * rng.normal();
      }
      if (t < t_in) {
        scene.set_history(agent, t, p);
      } else {
        truth.set_future(agent, t - t_in, p);
      }
    };

    scene.agent_mask[0] = truth.agent_mask[0] = true;
    for (std::size_t t = 0; t < steps; ++t) {
      emit(0, t, path_point(step * static_cast<double>(t), turn_start, kappa));
    }
    for (std::size_t j = 0; j < neighbors.size(); ++j) {
      scene.agent_mask[j + 1] = truth.agent_mask[j + 1] = true;
      for (std::size_t t = 0; t < steps; ++t) {
        emit(j + 1, t, along(neighbors[j], neighbors[j].speed * dt * static_cast<double>(t)));
      }
    }

    // Centerlines: every ego mode, then each neighbour's straight path.
    std::size_t lane = 0;
    auto lay = [&](auto && local_at, double s_end) {
      if (lane >= config.lanes) {
        return;
      }
      scene.lane_mask[lane] = true;
      for (std::size_t p = 0; p < k_points; ++p) {
        const double frac = k_points == 1 ? 0.0 : static_cast<double>(p) / static_cast<double>(k_points - 1);
        const double s = -kLaneMargin + frac * (s_end + 2.0 * kLaneMargin);
        scene.set_lane_point(lane, p, frame.apply(local_at(s)));
      }
      ++lane;
    };
    const double ego_end = step * static_cast<double>(steps - 1);
    for (double c : curvatures) {
      lay([&](double s) { return path_point(s, turn_start, c); }, ego_end);
    }
    for (const auto & nb : neighbors) {
      lay([&](double s) { return along(nb, s); }, nb.speed * dt * static_cast<double>(steps - 1));
    }

    g.record.scene = std::move(scene);
    g.record.truth = std::move(truth);
    g.record.t_out = t_out;
    g.record.sample_rate_hz = config.sample_rate_hz;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace eqf::data
