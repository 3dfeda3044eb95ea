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

#ifndef EQF__PARAMS_HPP_
#define EQF__PARAMS_HPP_

#include "eqf/nd/graph.hpp"
#include "eqf/rng.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace eqf
{

struct NamedParam
{
  std::string name;
  nd::Var var;
};

/// Ordered registry of learnable arrays; insertion order is checkpoint order.
class ParamStore
{
public:
  nd::Var add(const std::string & name, nd::Array init);
  nd::Var get(const std::string & name) const;
  bool contains(const std::string & name) const;

  const std::vector<NamedParam> & entries() const { return entries_; }
  std::vector<nd::Var> vars() const;
  /// Parameters whose name starts with `prefix`.
  std::vector<nd::Var> vars_with_prefix(const std::string & prefix) const;
  /// Total number of scalars.
  std::size_t count() const;
  std::size_t count_with_prefix(const std::string & prefix) const;

private:
  std::vector<NamedParam> entries_;
};

/// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
nd::Array fan_in_uniform(Rng & rng, nd::Shape shape, std::size_t fan_in);

/// y = x W + b for x of shape [rows, in].
struct Linear
{
  nd::Var weight;  //!< [in, out]
  nd::Var bias;    //!< [out]

  nd::Var operator()(const nd::Var & x) const;
};

Linear make_linear(ParamStore & store, Rng & rng, const std::string & name, std::size_t in, std::size_t out);

/// Stack of Linear layers with relu between them (none after the last).
struct Mlp
{
  std::vector<Linear> layers;

  nd::Var operator()(const nd::Var & x) const;
};

/// `widths` lists input, hidden and output sizes: {in, h1, ..., out}.
Mlp make_mlp(ParamStore & store, Rng & rng, const std::string & name, const std::vector<std::size_t> & widths);

/**
 * @brief Rotation-commuting linear map over the channel axis of [rows, 2, C] features.
 *
 * out = Z A + J (Z B) where J is the quarter-turn acting on the coordinate
 * axis. Both terms commute with every planar rotation; neither has a bias, so
 * mean-centered input stays centered.
 */
struct ChannelMix
{
  nd::Var aligned;  //!< [C_in, C_out]
  nd::Var turned;   //!< [C_in, C_out]

  nd::Var operator()(const nd::Var & z) const;
};

enum class MixInit {
  kNearIdentity,  //!< identity (rectangular where needed) plus U(-0.01, 0.01)
  kSmall,         //!< U(-0.01, 0.01)
  kFanIn,         //!< fan-in uniform
};

ChannelMix make_channel_mix(
  ParamStore & store, Rng & rng, const std::string & name, std::size_t in, std::size_t out, MixInit aligned_init);

/// Quarter-turn (x, y) -> (-y, x) on axis 1 of a [rows, 2, C] array.
nd::Var quarter_turn(const nd::Var & z);

/// Channel mean of [rows, 2, C] features, kept as [rows, 2, 1].
nd::Var channel_mean(const nd::Var & z);

/// Per-channel Euclidean norms of [rows, 2, C] features: [rows, C].
nd::Var channel_norms(const nd::Var & z);

}  // namespace eqf

#endif  // EQF__PARAMS_HPP_
