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

#ifndef EQF__HARNESS__ADAM_HPP_
#define EQF__HARNESS__ADAM_HPP_

#include "eqf/nd/graph.hpp"

#include <cstdint>
#include <vector>

namespace eqf::harness
{

struct AdamOptions
{
  double learning_rate{1e-3};
  double beta1{0.9};
  double beta2{0.999};
  double epsilon{1e-8};
};

/// First and second moments per parameter, in parameter order.
struct AdamState
{
  std::vector<nd::Array> first;
  std::vector<nd::Array> second;
  std::uint64_t step{0};

  friend bool operator==(const AdamState &, const AdamState &) = default;
};

/// Zero moments shaped like `params`.
AdamState make_adam_state(const std::vector<nd::Var> & params);

/**
 * @brief One bias-corrected Adam update of every parameter, in place.
 *
 * Parameters without a gradient entry are treated as having zero gradient.
 */
void adam_step(
  const std::vector<nd::Var> & params, const nd::Gradients & grads, AdamState & state, const AdamOptions & options);

/// Same update from explicit gradient arrays aligned with `params`.
void adam_step(
  const std::vector<nd::Var> & params, const std::vector<nd::Array> & grads, AdamState & state,
  const AdamOptions & options);

}  // namespace eqf::harness

#endif  // EQF__HARNESS__ADAM_HPP_
