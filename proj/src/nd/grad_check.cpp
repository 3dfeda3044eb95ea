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

#include "eqf/nd/grad_check.hpp"

#include <cmath>

namespace eqf::nd
{

GradCheckResult grad_check(const std::function<Var()> & f, std::vector<Var> params, double step)
{
  GradCheckResult result;
  const Gradients analytic = backward(f());
  for (std::size_t p = 0; p < params.size(); ++p) {
    Array & value = params[p].mutable_leaf_value();
    const Array grad = analytic.at(params[p]);
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      value[i] = saved + step;
      const double up = f().value()[0];
      value[i] = saved - step;
      const double down = f().value()[0];
      value[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double err = std::abs(grad[i] - numeric) / (std::abs(numeric) + 1e-8);
      ++result.entries_checked;
      if (err > result.max_relative_error || result.entries_checked == 1) {
        result.max_relative_error = err;
        result.worst_param = p;
        result.worst_entry = i;
        result.worst_analytic = grad[i];
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace eqf::nd
