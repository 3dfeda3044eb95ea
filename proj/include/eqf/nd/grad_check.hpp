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

#ifndef EQF__ND__GRAD_CHECK_HPP_
#define EQF__ND__GRAD_CHECK_HPP_

#include "eqf/nd/graph.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace eqf::nd
{

struct GradCheckResult
{
  double max_relative_error{0.0};
  std::size_t worst_param{0};  //!< Index into the checked parameter list.
  std::size_t worst_entry{0};
  double worst_analytic{0.0};
  double worst_numeric{0.0};
  std::size_t entries_checked{0};
};

/**
 * @brief Compares reverse-mode gradients against central differences.
 *
 * `f` must rebuild its graph from the current parameter values on every call.
 * The error per entry is |analytic - numeric| / (|numeric| + 1e-8); the
 * maximum over all entries of all parameters is reported. Parameter values are
 * restored before returning.
 */
GradCheckResult grad_check(
  const std::function<Var()> & f, std::vector<Var> params, double step = 1e-5);

}  // namespace eqf::nd

#endif  // EQF__ND__GRAD_CHECK_HPP_
