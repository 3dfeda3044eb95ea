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

#include "eqf/harness/evaluate.hpp"

#include "eqf/harness/trainer.hpp"

#include <algorithm>

namespace eqf::harness
{

std::vector<ForecastSet> forecast_all(
  const Model & model, const std::vector<data::SceneRecord> & dataset, std::size_t batch_size)
{
  check_dataset(dataset, model.config(), false);
  batch_size = std::max<std::size_t>(batch_size, 1);
  std::vector<ForecastSet> out;
  out.reserve(dataset.size());
  for (std::size_t first = 0; first < dataset.size(); first += batch_size) {
    std::vector<Scene> scenes;
    for (std::size_t i = first; i < std::min(dataset.size(), first + batch_size); ++i) {
      scenes.push_back(dataset[i].scene);
    }
    for (auto & f : forecast(model, scenes)) {
      out.push_back(std::move(f));
    }
  }
  return out;
}

Evaluation evaluate(
  const Model & model, const std::vector<data::SceneRecord> & dataset, const std::vector<std::size_t> & horizons,
  double threshold, std::size_t batch_size)
{
  if (dataset.empty()) {
    throw std::invalid_argument("evaluate: empty dataset");
  }
  check_dataset(dataset, model.config(), true);
  Evaluation ev;
  ev.forecasts = forecast_all(model, dataset, batch_size);
  std::vector<GroundTruth> truths;
  std::vector<ForecastSet> baseline;
  for (const auto & r : dataset) {
    truths.push_back(*r.truth);
    baseline.push_back(constant_velocity_baseline(r.scene, model.config().t_out));
  }
  for (std::size_t tau : horizons) {
    ev.model.push_back(compute_metrics(ev.forecasts, truths, tau, threshold));
    ev.baseline.push_back(compute_metrics(baseline, truths, tau, threshold));
  }
  return ev;
}

std::string format_evaluation(const Evaluation & evaluation)
{
  std::string out;
  for (std::size_t i = 0; i < evaluation.model.size(); ++i) {
    const std::string tau = "tau" + std::to_string(evaluation.model[i].horizon);
    out += to_key_values(evaluation.model[i], "model." + tau);
    out += to_key_values(evaluation.baseline[i], "baseline." + tau);
  }
  return out;
}

}  // namespace eqf::harness
