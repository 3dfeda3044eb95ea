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

#ifndef EQF__SCENE_HPP_
#define EQF__SCENE_HPP_

#include "eqf/config.hpp"
#include "eqf/nd/array.hpp"

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqf
{

struct Point
{
  double x{0.0};
  double y{0.0};

  friend bool operator==(const Point &, const Point &) = default;
};

/**
 * @brief Model input: agent histories and lane centerlines in map-frame meters.
 *
 * Rows whose mask is false are padding and must be all-zero. A real agent may
 * sit at the origin, so masks are never inferred from coordinates.
 */
struct Scene
{
  nd::Array histories;           //!< [A, T_in, 2]
  std::vector<bool> agent_mask;  //!< [A]
  nd::Array map;                 //!< [L, K, 2]
  std::vector<bool> lane_mask;   //!< [L]

  /// All-padding scene of the configured size.
  static Scene empty(const Config & config);

  std::size_t agents() const { return histories.dim(0); }
  std::size_t t_in() const { return histories.dim(1); }
  std::size_t lanes() const { return map.dim(0); }
  std::size_t lane_points() const { return map.dim(1); }

  Point history(std::size_t agent, std::size_t t) const;
  void set_history(std::size_t agent, std::size_t t, Point p);
  Point lane_point(std::size_t lane, std::size_t k) const;
  void set_lane_point(std::size_t lane, std::size_t k, Point p);
  std::size_t valid_agents() const;

  friend bool operator==(const Scene &, const Scene &) = default;
};

/// Future positions used for training and evaluation.
struct GroundTruth
{
  nd::Array futures;             //!< [A, T_out, 2]
  std::vector<bool> agent_mask;  //!< [A]

  static GroundTruth empty(const Config & config);

  std::size_t agents() const { return futures.dim(0); }
  std::size_t t_out() const { return futures.dim(1); }
  Point future(std::size_t agent, std::size_t t) const;
  void set_future(std::size_t agent, std::size_t t, Point p);

  friend bool operator==(const GroundTruth &, const GroundTruth &) = default;
};

/// H candidate trajectories per agent with a probability simplex over them.
struct ForecastSet
{
  nd::Array trajectories;   //!< [A, H, T_out, 2]
  nd::Array probabilities;  //!< [A, H]

  std::size_t agents() const { return trajectories.dim(0); }
  std::size_t heads() const { return trajectories.dim(1); }
  std::size_t t_out() const { return trajectories.dim(2); }
  Point point(std::size_t agent, std::size_t head, std::size_t t) const;

  friend bool operator==(const ForecastSet &, const ForecastSet &) = default;
};

/// Planar rigid motion x -> R x + t.
struct Se2Transform
{
  std::array<double, 4> rotation{1.0, 0.0, 0.0, 1.0};  //!< row-major 2x2
  Point translation{};

  static Se2Transform identity() { return {}; }
  static Se2Transform from_angle(double radians, Point translation = {});

  Point apply(Point p) const;
  /// Vectors rotate but do not translate.
  Point rotate(Point v) const;
  Se2Transform inverse() const;
  /// (this ∘ first): apply `first`, then this.
  Se2Transform after(const Se2Transform & first) const;
  /// max |RᵀR - I| entry.
  double orthogonality_error() const;
};

struct Violation
{
  std::string what;
  std::vector<std::size_t> index;  //!< agent / lane / time coordinates, outermost first
};

using Violations = std::vector<Violation>;

/// Padding, finiteness and shape rules. Empty result means valid.
Violations validate(const Scene & scene);
/// As above, plus dimensions against the configuration.
Violations validate(const Scene & scene, const Config & config);
Violations validate(const GroundTruth & truth);
/// Probabilities in [0, 1], rows summing to 1 within 1e-6, finite values.
Violations validate(const ForecastSet & forecast);

std::string describe(const Violations & violations);

class InvalidScene : public std::invalid_argument
{
public:
  explicit InvalidScene(const Violations & violations);
};

/// Applies the transform to every valid coordinate; masks and padding are unchanged.
Scene apply_se2(const Scene & scene, const Se2Transform & g);
GroundTruth apply_se2(const GroundTruth & truth, const Se2Transform & g);
/// Transforms trajectories; probabilities are carried over unchanged.
ForecastSet apply_se2(const ForecastSet & forecast, const Se2Transform & g);

/**
 * @brief Linear extrapolation of each agent's last two history points.
 *
 * Single head with probability one. Agents with fewer than two points (or
 * padded agents) hold their last position.
 */
ForecastSet constant_velocity_baseline(const Scene & scene, std::size_t t_out);

}  // namespace eqf

#endif  // EQF__SCENE_HPP_
