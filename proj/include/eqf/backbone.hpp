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

#ifndef EQF__BACKBONE_HPP_
#define EQF__BACKBONE_HPP_

#include "eqf/batch.hpp"
#include "eqf/config.hpp"
#include "eqf/params.hpp"

#include <vector>

/**
 * Geometric / pattern feature learning.
 *
 * Geometric features are [rows, 2, C] coordinate channels (coordinate axis in
 * the middle so a channel mix is one matmul). They are only ever re-centered
 * on their channel mean, mixed along the channel axis by rotation-commuting
 * maps, and scaled per channel by positive gates computed from invariants, so
 * they move rigidly with the scene. Pattern features are [rows, hidden] and
 * see nothing but distances, norms and angles.
 */
namespace eqf
{

struct CycleParams
{
  ChannelMix self_mix;
  ChannelMix interaction_mix;
  Mlp gate;      //!< [H ; channel norms] -> C
  Mlp neighbor;  //!< [H_j ; |g_i - g_j|] -> hidden
  Mlp update;    //!< [H ; neighbor mean ; channel norms] -> hidden
};

struct BackboneParams
{
  ChannelMix init_mix;  //!< T_in -> C over mean-centered history
  Mlp pattern_init;     //!< displacement norms and turning angles -> hidden
  Mlp fuse;             //!< [H ; map feature] -> hidden
  Mlp edge;             //!< [H_i ; H_j ; |g_i - g_j|] -> 1
  std::vector<CycleParams> cycles;

  static BackboneParams create(ParamStore & store, Rng & rng, const Config & config);
};

struct GeometricPattern
{
  nd::Var geometric;  //!< [rows, 2, C]
  nd::Var pattern;    //!< [rows, hidden]
};

struct BackboneOutput
{
  nd::Var geometric;  //!< G after the last cycle
  nd::Var pattern;    //!< H after the last cycle
  nd::Var edges;      //!< [rows, A]; entry (r, k) weights agent slot k of r's scene
  GeometricPattern initial;
};

/// Per-agent displacement norms then turning angles: [rows, 2 T_in - 3]; zero for padding.
nd::Array history_invariants(const SceneBatch & batch);

/// Initial features from the histories.
GeometricPattern init_features(const SceneBatch & batch, const BackboneParams & params);

/// MLP over [H ; scene map feature], per agent.
nd::Var fuse_map(const nd::Var & pattern, const nd::Var & map_feature, const SceneBatch & batch, const BackboneParams & params);

/// Pairwise interaction weights in (0, 1); zero on the diagonal and for padding.
nd::Var edge_weights(const nd::Var & geometric, const nd::Var & pattern, const SceneBatch & batch, const BackboneParams & params);

nd::Var geometric_layer(
  const nd::Var & geometric, const nd::Var & pattern, const nd::Var & edges, const SceneBatch & batch,
  const CycleParams & params);

nd::Var pattern_layer(
  const nd::Var & geometric, const nd::Var & pattern, const SceneBatch & batch, const CycleParams & params);

/// Initial features, map fusion and edges once, then every cycle in order.
BackboneOutput run_backbone(const SceneBatch & batch, const nd::Var & map_feature, const BackboneParams & params);

}  // namespace eqf

#endif  // EQF__BACKBONE_HPP_
