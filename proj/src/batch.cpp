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

#include "eqf/batch.hpp"

#include <algorithm>

namespace eqf
{

SceneBatch SceneBatch::from(std::span<const Scene> scenes)
{
  if (scenes.empty()) {
    throw InvalidScene(Violations{Violation{"empty batch", {}}});
  }
  SceneBatch b;
  const Scene & first = scenes.front();
  b.scenes = scenes.size();
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    auto violations = validate(scenes[i]);
    if (violations.empty() && (scenes[i].histories.shape() != first.histories.shape() ||
                               scenes[i].map.shape() != first.map.shape())) {
      violations.push_back({"scene shape differs from the first scene in the batch", {i}});
    }
    if (!violations.empty()) {
      throw InvalidScene(violations);
    }
  }
  b.agents = first.agents();
  b.t_in = first.t_in();
  b.lanes = first.lanes();
  b.lane_points = first.lane_points();
  b.histories = nd::Array({b.scenes * b.agents, b.t_in, 2});
  b.map = nd::Array({b.scenes * b.lanes, b.lane_points, 2});
  const std::size_t hist_stride = first.histories.size();
  const std::size_t map_stride = first.map.size();
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    std::copy(scenes[s].histories.data().begin(), scenes[s].histories.data().end(),
              b.histories.data().begin() + s * hist_stride);
    std::copy(scenes[s].map.data().begin(), scenes[s].map.data().end(), b.map.data().begin() + s * map_stride);
    b.agent_mask.insert(b.agent_mask.end(), scenes[s].agent_mask.begin(), scenes[s].agent_mask.end());
    b.lane_mask.insert(b.lane_mask.end(), scenes[s].lane_mask.begin(), scenes[s].lane_mask.end());
  }
  return b;
}

std::vector<std::size_t> SceneBatch::slot_rows(std::size_t k) const
{
  std::vector<std::size_t> rows_out(rows());
  for (std::size_t r = 0; r < rows_out.size(); ++r) {
    rows_out[r] = scene_of(r) * agents + k;
  }
  return rows_out;
}

std::vector<std::size_t> SceneBatch::scene_rows() const
{
  std::vector<std::size_t> out(rows());
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = scene_of(r);
  }
  return out;
}

nd::Array SceneBatch::row_mask() const
{
  nd::Array m({rows(), 1});
  for (std::size_t r = 0; r < rows(); ++r) {
    m[r] = agent_mask[r] ? 1.0 : 0.0;
  }
  return m;
}

nd::Array SceneBatch::pair_mask() const
{
  nd::Array m({rows(), agents});
  for (std::size_t r = 0; r < rows(); ++r) {
    const std::size_t base = scene_of(r) * agents;
    for (std::size_t k = 0; k < agents; ++k) {
      const bool distinct = base + k != r;
      m[r * agents + k] = agent_mask[r] && agent_mask[base + k] && distinct ? 1.0 : 0.0;
    }
  }
  return m;
}

}  // namespace eqf
