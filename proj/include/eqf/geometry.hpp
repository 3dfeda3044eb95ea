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

#ifndef EQF__GEOMETRY_HPP_
#define EQF__GEOMETRY_HPP_

#include <cstddef>
#include <span>

namespace eqf
{

/**
 * @brief Rigid-motion invariant description of an n-point polyline.
 *
 * Writes n-1 segment lengths followed by n-2 signed turning angles (radians,
 * counter-clockwise positive) between consecutive segments; a turn touching a
 * zero-length segment counts as 0. `xy` holds n interleaved (x, y) pairs and
 * `out` must hold 2n-3 values.
 */
void shape_descriptors(std::span<const double> xy, std::span<double> out);

/// Signed angle from u to v in (-pi, pi]; 0 when either vector is zero.
double turning_angle(double ux, double uy, double vx, double vy);

}  // namespace eqf

#endif  // EQF__GEOMETRY_HPP_
