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

#include "eqf/harness/adam.hpp"

#include <cmath>

namespace eqf::harness
{

AdamState make_adam_state(const std::vector<nd::Var> & params)
{
  AdamState s;
  for (const auto & p : params) {
    s.first.emplace_back(p.shape());
    s.second.emplace_back(p.shape());
  }
  return s;
}

void adam_step(
  const std::vector<nd::Var> & params, const nd::Gradients & grads, AdamState & state, const AdamOptions & options)
{
  std::vector<nd::Array> aligned;
  aligned.reserve(params.size());
  for (const auto & p : params) {
    aligned.push_back(grads.at(p));
  }
  adam_step(params, aligned, state, options);
}

void adam_step(
  const std::vector<nd::Var> & params, const std::vector<nd::Array> & grads, AdamState & state,
  const AdamOptions & options)
{
  if (grads.size() != params.size() || state.first.size() != params.size() || state.second.size() != params.size()) {
    throw nd::ShapeError("adam_step: parameter, gradient and moment counts differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correct1 = 1.0 - std::pow(options.beta1, t);
  const double correct2 = 1.0 - std::pow(options.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    nd::Var param = params[i];
    auto & value = param.mutable_leaf_value();
    const auto & g = grads[i];
    auto & m = state.first[i];
    auto & v = state.second[i];
    if (g.shape() != value.shape() || m.shape() != value.shape() || v.shape() != value.shape()) {
      throw nd::ShapeError("adam_step: shape mismatch at parameter " + std::to_string(i));
    }
    for (std::size_t j = 0; j < value.size(); ++j) {
      m[j] = options.beta1 * m[j] + (1.0 - options.beta1) * g[j];
      v[j] = options.beta2 * v[j] + (1.0 - options.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correct1;
      const double v_hat = v[j] / correct2;
      value[j] -= options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  }
}

}  // namespace eqf::harness
