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

#ifndef EQF__OBJECTIVE_HPP_
#define EQF__OBJECTIVE_HPP_

#include "eqf/nd/graph.hpp"
#include "eqf/scene.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace eqf
{

/// Probabilities are clamped to this before the log.
inline constexpr double kProbabilityFloor = 1e-12;

/// Mean pointwise L2 error of each head. `pred` is [H, T, 2], `truth` [T, 2].
std::vector<double> ade_per_head(const nd::Array & pred, const nd::Array & truth);

/// Lowest-index argmin. Throws on an empty input.
std::size_t min_ade_index(std::span<const double> errors);

/**
 * @brief ADE of every head for every row as a graph node.
 *
 * `trajectories` is [rows, H, T, 2], `futures` [rows, T, 2]; the result is
 * [rows, H]. Throws on T = 0.
 */
nd::Var ade_matrix(const nd::Var & trajectories, const nd::Array & futures);

/// Differentiable loss terms, each a scalar node.
struct LossTerms
{
  nd::Var trajectory;
  nd::Var probability;
  nd::Var combined;
  std::vector<std::size_t> best_head;  //!< per row; 0 for padding rows
  std::size_t valid_agents{0};
};

/**
 * @brief Best-head ADE and its negative log-probability, averaged over valid rows.
 *
 * The best head is chosen on values only, so selection is never
 * differentiated; the trajectory term carries gradient through the chosen
 * head's ADE and the probability term through the chosen probability.
 * Throws std::invalid_argument when no row is valid or beta is outside [0, 1].
 */
LossTerms loss_terms(
  const nd::Var & trajectories, const nd::Var & probabilities, const nd::Array & futures,
  const std::vector<bool> & mask, double beta);

struct LossBreakdown
{
  double trajectory{0.0};   //!< meters
  double probability{0.0};  //!< nats
  double combined{0.0};
  std::vector<std::size_t> best_head;
};

LossBreakdown to_breakdown(const LossTerms & terms);

/// Loss of one forecast against its ground truth; the forecast's agent mask is the truth's.
LossBreakdown combined_loss(const ForecastSet & forecast, const GroundTruth & truth, double beta);

struct MetricReport
{
  double min_ade{0.0};
  double min_fde{0.0};
  double miss_rate{0.0};
  std::size_t horizon{0};
  double threshold{0.0};
  std::size_t agents{0};  //!< valid agents the averages run over
};

/**
 * @brief minADE, minFDE and endpoint miss rate over the first `horizon` steps.
 *
 * Averages pool every valid agent of every scene. An agent misses when the
 * best endpoint error exceeds `threshold`. Throws on mismatched shapes,
 * horizon 0 or beyond T_out, a non-positive threshold, or no valid agents.
 */
MetricReport compute_metrics(
  std::span<const ForecastSet> forecasts, std::span<const GroundTruth> truths, std::size_t horizon,
  double threshold);

/// `prefix.key=value` lines: min_ade, min_fde, miss_rate, horizon, threshold, agents.
std::string to_key_values(const MetricReport & report, const std::string & prefix);

}  // namespace eqf

#endif  // EQF__OBJECTIVE_HPP_
