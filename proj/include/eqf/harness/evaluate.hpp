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

#ifndef EQF__HARNESS__EVALUATE_HPP_
#define EQF__HARNESS__EVALUATE_HPP_

#include "eqf/data/scene_io.hpp"
#include "eqf/objective.hpp"
#include "eqf/predictor.hpp"

#include <string>
#include <vector>

namespace eqf::harness
{

struct Evaluation
{
  std::vector<MetricReport> model;     //!< one per horizon
  std::vector<MetricReport> baseline;  //!< constant velocity, same horizons
  std::vector<ForecastSet> forecasts;  //!< model forecasts, one per scene
};

/// Model forecasts for every scene, `batch_size` scenes per forward pass.
std::vector<ForecastSet> forecast_all(
  const Model & model, const std::vector<data::SceneRecord> & dataset, std::size_t batch_size);

/**
 * @brief Metrics of the model and of the constant-velocity baseline.
 *
 * Throws std::invalid_argument naming the first scene whose shapes differ
 * from the model or that lacks ground truth.
 */
Evaluation evaluate(
  const Model & model, const std::vector<data::SceneRecord> & dataset, const std::vector<std::size_t> & horizons,
  double threshold, std::size_t batch_size = 64);

/// `model.tau<N>.*` and `baseline.tau<N>.*` key=value lines.
std::string format_evaluation(const Evaluation & evaluation);

}  // namespace eqf::harness

#endif  // EQF__HARNESS__EVALUATE_HPP_
