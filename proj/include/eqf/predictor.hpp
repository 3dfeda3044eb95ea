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

#ifndef EQF__PREDICTOR_HPP_
#define EQF__PREDICTOR_HPP_

#include "eqf/backbone.hpp"
#include "eqf/batch.hpp"
#include "eqf/config.hpp"
#include "eqf/map_encoder.hpp"
#include "eqf/params.hpp"
#include "eqf/scene.hpp"

#include <span>
#include <vector>

namespace eqf
{

/// Four channel mixes C -> hidden -> hidden -> hidden -> T_out with positive gates between them.
struct HeadParams
{
  std::vector<ChannelMix> mixes;
  std::vector<Linear> gates;  //!< [H ; channel norms] -> width, one per inner layer
};

/// Shared per-head scorer over [own trajectory ; mean of all trajectories] in a canonical frame.
struct ProbabilityParams
{
  Mlp scorer;
};

/// Trajectory of one head for every row: [rows, T_out, 2].
nd::Var decode_head(const nd::Var & geometric, const nd::Var & pattern, const HeadParams & head);

/**
 * @brief Rigid-motion invariant inputs for the probability scorer.
 *
 * Each agent's H trajectories are re-expressed relative to their common
 * centroid and rotated so that the mean head displacement (last minus first
 * point) points along +x. Returns [rows * H, 4 T_out]: a head's own T_out
 * points followed by the mean over heads.
 */
nd::Array probability_features(const nd::Array & trajectories);

/**
 * @brief Per-agent simplex over heads from detached trajectories.
 *
 * `trajectories` is [rows, H, T_out, 2]; it is detached here, so gradients of
 * anything computed from the result reach only the scorer's parameters.
 */
nd::Var estimate_probabilities(const nd::Var & trajectories, const ProbabilityParams & params);

struct ModelOutput
{
  nd::Var trajectories;   //!< [rows, H, T_out, 2]
  nd::Var probabilities;  //!< [rows, H]
  MapEncoding map;
  BackboneOutput backbone;
};

/// Every learnable map of the pipeline, grouped under "map.", "backbone.", "decoder.", "probability.".
class Model
{
public:
  explicit Model(const Config & config);

  const Config & config() const { return config_; }
  ParamStore & params() { return store_; }
  const ParamStore & params() const { return store_; }
  const BackboneParams & backbone() const { return backbone_; }
  const std::vector<HeadParams> & heads() const { return heads_; }
  const ProbabilityParams & probability() const { return probability_; }
  const MapEncoder & map_encoder() const { return map_encoder_; }

  /// Parameters the probability loss may legitimately reach.
  std::vector<nd::Var> probability_params() const { return store_.vars_with_prefix("probability."); }
  /// Everything else: map encoder, backbone and decoder heads.
  std::vector<nd::Var> trajectory_params() const;

  ModelOutput forward(const SceneBatch & batch) const;

private:
  Config config_;
  ParamStore store_;
  MapEncoder map_encoder_;
  BackboneParams backbone_;
  std::vector<HeadParams> heads_;
  ProbabilityParams probability_;
};

/// Splits batched output into one ForecastSet per scene.
std::vector<ForecastSet> to_forecasts(const ModelOutput & output, const SceneBatch & batch);

/// Throws InvalidScene if any scene fails validation against the model configuration.
std::vector<ForecastSet> forecast(const Model & model, std::span<const Scene> scenes);
ForecastSet forecast(const Model & model, const Scene & scene);

struct Selection
{
  std::size_t head{0};
  double probability{0.0};
  std::vector<Point> trajectory;
};

/// Max-probability head per agent; ties go to the lowest index.
std::vector<Selection> select_trajectory(const ForecastSet & forecast);

}  // namespace eqf

#endif  // EQF__PREDICTOR_HPP_
