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

#ifndef EQF_TESTS__SUPPORT_HPP_
#define EQF_TESTS__SUPPORT_HPP_

// Shared fixtures and independent plain-loop oracles. Nothing here calls the
// library code it is used to check.

#include "eqf/config.hpp"
#include "eqf/rng.hpp"
#include "eqf/scene.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace eqf::testing
{

/// Smooth random walks for a random subset of agents (slot 0 always valid) and random lanes.
inline Scene random_scene(const Config & config, Rng & rng, bool all_valid = false)
{
  Scene s = Scene::empty(config);
  for (std::size_t a = 0; a < config.agents; ++a) {
    s.agent_mask[a] = a == 0 || all_valid || rng.uniform() < 0.7;
    if (!s.agent_mask[a]) {
      continue;
    }
    double x = rng.uniform(-30.0, 30.0);
    double y = rng.uniform(-30.0, 30.0);
    double heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const double speed = rng.uniform(0.3, 1.5);
    for (std::size_t t = 0; t < config.t_in; ++t) {
      s.set_history(a, t, {x, y});
      heading += rng.uniform(-0.15, 0.15);
      x += speed * std::cos(heading) + 0.05 * rng.normal();
      y += speed * std::sin(heading) + 0.05 * rng.normal();
    }
  }
  for (std::size_t l = 0; l < config.lanes; ++l) {
    s.lane_mask[l] = l == 0 || all_valid || rng.uniform() < 0.6;
    if (!s.lane_mask[l]) {
      continue;
    }
    double x = rng.uniform(-40.0, 40.0);
    double y = rng.uniform(-40.0, 40.0);
    double heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
    for (std::size_t k = 0; k < config.lane_points; ++k) {
      s.set_lane_point(l, k, {x, y});
      heading += rng.uniform(-0.1, 0.1);
      x += 2.0 * std::cos(heading);
      y += 2.0 * std::sin(heading);
    }
  }
  return s;
}

inline GroundTruth random_truth(const Scene & scene, std::size_t t_out, Rng & rng)
{
  GroundTruth g;
  g.futures = nd::Array({scene.agents(), t_out, 2});
  g.agent_mask = scene.agent_mask;
  for (std::size_t a = 0; a < scene.agents(); ++a) {
    if (!scene.agent_mask[a]) {
      continue;
    }
    Point p = scene.history(a, scene.t_in() - 1);
    for (std::size_t t = 0; t < t_out; ++t) {
      p.x += rng.uniform(-1.5, 1.5);
      p.y += rng.uniform(-1.5, 1.5);
      g.set_future(a, t, p);
    }
  }
  return g;
}

/// Random trajectories around the truth and a random simplex per agent.
inline ForecastSet random_forecast(const GroundTruth & truth, std::size_t heads, Rng & rng)
{
  ForecastSet f;
  const std::size_t agents = truth.agents();
  const std::size_t steps = truth.t_out();
  f.trajectories = nd::Array({agents, heads, steps, 2});
  f.probabilities = nd::Array({agents, heads});
  for (std::size_t a = 0; a < agents; ++a) {
    double total = 0.0;
    for (std::size_t h = 0; h < heads; ++h) {
      const double spread = rng.uniform(0.1, 4.0);
      for (std::size_t t = 0; t < steps; ++t) {
        const Point g = truth.future(a, t);
        f.trajectories[((a * heads + h) * steps + t) * 2] = g.x + spread * rng.normal();
        f.trajectories[((a * heads + h) * steps + t) * 2 + 1] = g.y + spread * rng.normal();
      }
      f.probabilities[a * heads + h] = rng.uniform(0.01, 1.0);
      total += f.probabilities[a * heads + h];
    }
    for (std::size_t h = 0; h < heads; ++h) {
      f.probabilities[a * heads + h] /= total;
    }
  }
  return f;
}

inline Se2Transform random_transform(Rng & rng)
{
  return Se2Transform::from_angle(
    rng.uniform(-std::numbers::pi, std::numbers::pi), {rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0)});
}

inline double max_abs_diff(const nd::Array & a, const nd::Array & b)
{
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

inline double norm(const nd::Array & a)
{
  double s = 0.0;
  for (double v : a.data()) {
    s += v * v;
  }
  return std::sqrt(s);
}

/// ||a - b|| / (||b|| + 1e-8)
inline double relative_error(const nd::Array & a, const nd::Array & b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += (a[i] - b[i]) * (a[i] - b[i]);
  }
  return std::sqrt(s) / (norm(b) + 1e-8);
}

/// Per-directory scratch space removed on destruction.
class TempDir
{
public:
  explicit TempDir(const std::string & tag)
  {
    path_ = std::filesystem::temp_directory_path() /
            ("eqf_test_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir &) = delete;
  TempDir & operator=(const TempDir &) = delete;
  const std::filesystem::path & path() const { return path_; }

private:
  std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Plain-loop oracles.

inline double oracle_distance(double ax, double ay, double bx, double by)
{
  return std::sqrt((ax - bx) * (ax - bx) + (ay - by) * (ay - by));
}

/// ADE of head h of agent a over the first `horizon` steps.
inline double oracle_ade(const ForecastSet & f, const GroundTruth & g, std::size_t a, std::size_t h, std::size_t horizon)
{
  double sum = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const Point p = f.point(a, h, t);
    const Point q = g.future(a, t);
    sum += oracle_distance(p.x, p.y, q.x, q.y);
  }
  return sum / static_cast<double>(horizon);
}

inline double oracle_fde(const ForecastSet & f, const GroundTruth & g, std::size_t a, std::size_t h, std::size_t horizon)
{
  const Point p = f.point(a, h, horizon - 1);
  const Point q = g.future(a, horizon - 1);
  return oracle_distance(p.x, p.y, q.x, q.y);
}

struct OracleMetrics
{
  double min_ade{0.0};
  double min_fde{0.0};
  double miss_rate{0.0};
};

inline OracleMetrics oracle_metrics(
  const std::vector<ForecastSet> & fs, const std::vector<GroundTruth> & gs, std::size_t horizon, double d)
{
  OracleMetrics m;
  double count = 0.0;
  double misses = 0.0;
  for (std::size_t s = 0; s < fs.size(); ++s) {
    for (std::size_t a = 0; a < gs[s].agents(); ++a) {
      if (!gs[s].agent_mask[a]) {
        continue;
      }
      double best_ade = std::numeric_limits<double>::infinity();
      double best_fde = std::numeric_limits<double>::infinity();
      for (std::size_t h = 0; h < fs[s].heads(); ++h) {
        best_ade = std::min(best_ade, oracle_ade(fs[s], gs[s], a, h, horizon));
        best_fde = std::min(best_fde, oracle_fde(fs[s], gs[s], a, h, horizon));
      }
      m.min_ade += best_ade;
      m.min_fde += best_fde;
      misses += best_fde > d ? 1.0 : 0.0;
      count += 1.0;
    }
  }
  m.min_ade /= count;
  m.min_fde /= count;
  m.miss_rate = misses / count;
  return m;
}

struct OracleLoss
{
  double trajectory{0.0};
  double probability{0.0};
  double combined{0.0};
};

inline OracleLoss oracle_loss(const ForecastSet & f, const GroundTruth & g, double beta)
{
  OracleLoss l;
  double count = 0.0;
  for (std::size_t a = 0; a < g.agents(); ++a) {
    if (!g.agent_mask[a]) {
      continue;
    }
    std::size_t best = 0;
    double best_ade = oracle_ade(f, g, a, 0, g.t_out());
    for (std::size_t h = 1; h < f.heads(); ++h) {
      const double e = oracle_ade(f, g, a, h, g.t_out());
      if (e < best_ade) {
        best_ade = e;
        best = h;
      }
    }
    l.trajectory += best_ade;
    l.probability -= std::log(std::max(f.probabilities[a * f.heads() + best], 1e-12));
    count += 1.0;
  }
  l.trajectory /= count;
  l.probability /= count;
  l.combined = beta * l.trajectory + (1.0 - beta) * l.probability;
  return l;
}

}  // namespace eqf::testing

#endif  // EQF_TESTS__SUPPORT_HPP_
