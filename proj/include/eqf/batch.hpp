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

#ifndef EQF__BATCH_HPP_
#define EQF__BATCH_HPP_

#include "eqf/nd/array.hpp"
#include "eqf/scene.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace eqf
{

/**
 * @brief Several scenes stacked along the agent (and lane) axis.
 *
 * Row r belongs to scene r / A and is agent r % A of that scene, so every
 * per-agent operation runs once over all rows.
 */
struct SceneBatch
{
  std::size_t scenes{0};
  std::size_t agents{0};
  std::size_t t_in{0};
  std::size_t lanes{0};
  std::size_t lane_points{0};
  nd::Array histories;           //!< [B*A, T_in, 2]
  std::vector<bool> agent_mask;  //!< [B*A]
  nd::Array map;                 //!< [B*L, K, 2]
  std::vector<bool> lane_mask;   //!< [B*L]

  /// Throws InvalidScene when a scene fails validation or shapes disagree.
  static SceneBatch from(std::span<const Scene> scenes);

  std::size_t rows() const { return scenes * agents; }
  std::size_t scene_of(std::size_t row) const { return row / agents; }

  /// Row of agent slot `k` in the same scene as every row: [B*A].
  std::vector<std::size_t> slot_rows(std::size_t k) const;
  /// Scene index per row: [B*A].
  std::vector<std::size_t> scene_rows() const;
  /// 1 for valid rows, 0 for padding: [B*A, 1].
  nd::Array row_mask() const;
  /// 1 where row i and slot k are distinct valid agents: [B*A, A].
  nd::Array pair_mask() const;
};

}  // namespace eqf

#endif  // EQF__BATCH_HPP_
