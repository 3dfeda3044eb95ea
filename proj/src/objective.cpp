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

#include "eqf/objective.hpp"

#include "eqf/config.hpp"

#include <algorithm>
#include <stdexcept>

namespace eqf
{

nd::Var ade_matrix(const nd::Var & trajectories, const nd::Array & futures)
{
  if (trajectories.shape().size() != 4 || futures.rank() != 3 || trajectories.dim(3) != 2 ||
      futures.dim(0) != trajectories.dim(0) || futures.dim(1) != trajectories.dim(2) || futures.dim(2) != 2) {
    throw nd::ShapeError(
      "ade_matrix: trajectories " + nd::to_string(trajectories.shape()) + " vs futures " +
      nd::to_string(futures.shape()));
  }
  if (futures.dim(1) == 0) {
    throw std::invalid_argument("ade_matrix: trajectories have no time steps");
  }
  const std::size_t rows = futures.dim(0);
  const std::size_t steps = futures.dim(1);
  const auto truth = nd::Var::constant(futures.reshaped({rows, 1, steps, 2}));
  return nd::mean(nd::l2_norm(trajectories - truth), 2);
}

std::vector<double> ade_per_head(const nd::Array & pred, const nd::Array & truth)
{
  if (pred.rank() != 3 || truth.rank() != 2) {
    throw nd::ShapeError("ade_per_head: expected [H, T, 2] and [T, 2]");
  }
  const std::size_t heads = pred.dim(0);
  const std::size_t steps = pred.dim(1);
  const auto e = ade_matrix(
    nd::Var::constant(pred.reshaped({1, heads, steps, 2})), truth.reshaped({1, truth.dim(0), truth.dim(1)}));
  return {e.value().data().begin(), e.value().data().end()};
}

std::size_t min_ade_index(std::span<const double> errors)
{
  if (errors.empty()) {
    throw std::invalid_argument("min_ade_index: no heads");
  }
  return static_cast<std::size_t>(std::min_element(errors.begin(), errors.end()) - errors.begin());
}

LossTerms loss_terms(
  const nd::Var & trajectories, const nd::Var & probabilities, const nd::Array & futures,
  const std::vector<bool> & mask, double beta)
{
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("loss: beta must lie in [0, 1], got " + format_double(beta));
  }
  const auto errors = ade_matrix(trajectories, futures);
  const std::size_t rows = errors.dim(0);
  const std::size_t heads = errors.dim(1);
  if (mask.size() != rows || probabilities.shape() != nd::Shape{rows, heads}) {
    throw nd::ShapeError(
      "loss: probabilities " + nd::to_string(probabilities.shape()) + " and mask of " +
      std::to_string(mask.size()) + " do not match errors " + nd::to_string(errors.shape()));
  }
  LossTerms out;
  out.valid_agents = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  if (out.valid_agents == 0) {
    throw std::invalid_argument("loss: no valid agents");
  }

  out.best_head = nd::argmin(errors.value(), 1);
  nd::Array pick({rows, heads});
  const double w = 1.0 / static_cast<double>(out.valid_agents);
  for (std::size_t r = 0; r < rows; ++r) {
    if (mask[r]) {
      pick[r * heads + out.best_head[r]] = w;
    } else {
      out.best_head[r] = 0;
    }
  }
  const auto weights = nd::Var::constant(std::move(pick));
  out.trajectory = nd::sum_all(errors * weights);
  out.probability = nd::affine(nd::sum_all(nd::log(probabilities, kProbabilityFloor) * weights), -1.0);
  out.combined = nd::affine(out.trajectory, beta) + nd::affine(out.probability, 1.0 - beta);
  return out;
}

LossBreakdown to_breakdown(const LossTerms & terms)
{
  return {terms.trajectory.value()[0], terms.probability.value()[0], terms.combined.value()[0], terms.best_head};
}

LossBreakdown combined_loss(const ForecastSet & forecast, const GroundTruth & truth, double beta)
{
  if (forecast.agents() != truth.agents() || forecast.t_out() != truth.t_out()) {
    throw nd::ShapeError(
      "combined_loss: forecast " + nd::to_string(forecast.trajectories.shape()) + " vs truth " +
      nd::to_string(truth.futures.shape()));
  }
  return to_breakdown(loss_terms(
    nd::Var::constant(forecast.trajectories), nd::Var::constant(forecast.probabilities), truth.futures,
    truth.agent_mask, beta));
}

MetricReport compute_metrics(
  std::span<const ForecastSet> forecasts, std::span<const GroundTruth> truths, std::size_t horizon,
  double threshold)
{
  if (forecasts.size() != truths.size()) {
    throw std::invalid_argument(
      "metrics: " + std::to_string(forecasts.size()) + " forecasts for " + std::to_string(truths.size()) +
      " ground truths");
  }
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("metrics: miss threshold must be positive");
  }
  if (forecasts.empty()) {
    throw std::invalid_argument("metrics: nothing to evaluate");
  }

  // Stack the valid agents of every scene, truncated to the horizon.
  const std::size_t heads = forecasts.front().heads();
  std::vector<double> pred;
  std::vector<double> gt;
  std::size_t rows = 0;
  for (std::size_t s = 0; s < forecasts.size(); ++s) {
    const auto & f = forecasts[s];
    const auto & g = truths[s];
    if (f.heads() != heads || f.agents() != g.agents() || f.t_out() != g.t_out()) {
      throw nd::ShapeError("metrics: scene " + std::to_string(s) + " has mismatched forecast and truth shapes");
    }
    if (horizon == 0 || horizon > g.t_out()) {
      throw std::invalid_argument(
        "metrics: horizon " + std::to_string(horizon) + " outside [1, " + std::to_string(g.t_out()) + "]");
    }
    for (std::size_t a = 0; a < g.agents(); ++a) {
      if (!g.agent_mask[a]) {
        continue;
      }
      ++rows;
      for (std::size_t h = 0; h < heads; ++h) {
        for (std::size_t t = 0; t < horizon; ++t) {
          const Point p = f.point(a, h, t);
          pred.push_back(p.x);
          pred.push_back(p.y);
        }
      }
      for (std::size_t t = 0; t < horizon; ++t) {
        const Point p = g.future(a, t);
        gt.push_back(p.x);
        gt.push_back(p.y);
      }
    }
  }
  if (rows == 0) {
    throw std::invalid_argument("metrics: no valid agents");
  }

  const auto traj = nd::Var::constant(nd::Array({rows, heads, horizon, 2}, std::move(pred)));
  const nd::Array futures({rows, horizon, 2}, std::move(gt));
  const auto ade = ade_matrix(traj, futures).value();
  const auto fde = ade_matrix(
                     nd::slice(traj, 2, horizon - 1, 1),
                     nd::slice(nd::Var::constant(futures), 1, horizon - 1, 1).value())
                     .value();

  MetricReport report;
  report.horizon = horizon;
  report.threshold = threshold;
  report.agents = rows;
  const auto best_ade = nd::argmin(ade, 1);
  const auto best_fde = nd::argmin(fde, 1);
  std::size_t misses = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    report.min_ade += ade[r * heads + best_ade[r]];
    const double end = fde[r * heads + best_fde[r]];
    report.min_fde += end;
    misses += end > threshold ? 1 : 0;
  }
  const double n = static_cast<double>(rows);
  report.min_ade /= n;
  report.min_fde /= n;
  report.miss_rate = static_cast<double>(misses) / n;
  return report;
}

std::string to_key_values(const MetricReport & report, const std::string & prefix)
{
  std::string out;
  auto line = [&](const char * key, const std::string & value) { out += prefix + "." + key + "=" + value + "\n"; };
  line("min_ade", format_double(report.min_ade));
  line("min_fde", format_double(report.min_fde));
  line("miss_rate", format_double(report.miss_rate));
  line("horizon", std::to_string(report.horizon));
  line("threshold", format_double(report.threshold));
  line("agents", std::to_string(report.agents));
  return out;
}

}  // namespace eqf
