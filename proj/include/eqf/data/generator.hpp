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

#ifndef EQF__DATA__GENERATOR_HPP_
#define EQF__DATA__GENERATOR_HPP_

#include "eqf/config.hpp"
#include "eqf/data/scene_io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace eqf::data
{

enum class ScenarioKind { kStraight, kLeftTurn, kRightTurn, kFork };

const char * to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string & text);

/**
 * @brief Synthetic traffic around one ego agent (slot 0).
 *
 * The ego drives straight through the observed window and then either keeps
 * going or follows a circular arc. A fork picks one of `modes` curvatures
 * evenly spaced from +1/turn_radius (left) to -1/turn_radius (right),
 * uniformly at random. Neighbours drive straight at constant speed.
 */
struct ScenarioSpec
{
  ScenarioKind kind{ScenarioKind::kFork};
  double speed{10.0};        //!< ego speed, m/s
  double turn_radius{20.0};  //!< m
  std::size_t modes{3};
  double noise{0.0};         //!< std-dev of iid position noise, m
  double speed_jitter{0.0};  //!< ego speed is speed * (1 + U(-j, j))
  /// Turns start this far (uniform, m) beyond the last observed position.
  double turn_offset_min{0.0};
  double turn_offset_max{5.0};

  /// Throws std::invalid_argument on modes = 0 or negative magnitudes.
  void validate() const;
};

struct GeneratedScene
{
  SceneRecord record;
  std::size_t mode{0};  //!< index of the ego curvature among the kind's modes
};

/// Curvatures of the kind's modes, left to right.
std::vector<double> mode_curvatures(const ScenarioSpec & spec);

/**
 * @brief Position after arc length `s` along a path that is straight up to
 * `turn_start` and then bends with curvature `kappa`, starting at the origin
 * heading along +x.
 */
Point path_point(double s, double turn_start, double kappa);

/// `n` scenes sized by `config`; identical for identical arguments.
std::vector<GeneratedScene> generate_scenes(
  const ScenarioSpec & spec, const Config & config, std::size_t n, std::uint64_t seed);

}  // namespace eqf::data

#endif  // EQF__DATA__GENERATOR_HPP_
