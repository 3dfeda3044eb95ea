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

#ifndef EQF__MAP_ENCODER_HPP_
#define EQF__MAP_ENCODER_HPP_

#include "eqf/batch.hpp"
#include "eqf/config.hpp"
#include "eqf/params.hpp"

namespace eqf
{

struct MapEncoding
{
  nd::Var feature;      //!< [B, hidden]; zero rows for scenes without lanes
  nd::Array attention;  //!< [B*L, B*L] row-stochastic weights; empty for MapMode::kNone
};

/**
 * @brief Pools the lanes of each scene into one hidden-width vector.
 *
 * Each lane becomes a token through an MLP, tokens attend to the valid lanes
 * of their own scene with single-head scaled dot-product attention, and the
 * attended tokens are averaged over valid lanes.
 *
 * kRaw tokenizes the flattened polyline after subtracting the centroid of
 * the scene's valid lane points, which makes it translation invariant. kInvariant
 * tokenizes segment lengths and turning angles only, which makes it invariant
 * to every rigid motion. kNone yields zeros and owns no parameters.
 */
class MapEncoder
{
public:
  MapEncoder() = default;
  MapEncoder(ParamStore & store, Rng & rng, const Config & config);

  MapEncoding encode(const SceneBatch & batch) const;

  MapMode mode() const { return mode_; }

private:
  nd::Array lane_inputs(const SceneBatch & batch) const;

  MapMode mode_{MapMode::kNone};
  std::size_t hidden_{0};
  Mlp lane_mlp_;
  Linear query_;
  Linear key_;
  Linear value_;
};

}  // namespace eqf

#endif  // EQF__MAP_ENCODER_HPP_
