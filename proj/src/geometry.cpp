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

#include "eqf/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace eqf
{

double turning_angle(double ux, double uy, double vx, double vy)
{
  if ((ux == 0.0 && uy == 0.0) || (vx == 0.0 && vy == 0.0)) {
    return 0.0;
  }
  return std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
}

void shape_descriptors(std::span<const double> xy, std::span<double> out)
{
  const std::size_t n = xy.size() / 2;
  if (n < 2 || xy.size() % 2 != 0 || out.size() != 2 * n - 3) {
    throw std::invalid_argument("shape_descriptors: inconsistent buffer sizes");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dx = xy[2 * i + 2] - xy[2 * i];
    const double dy = xy[2 * i + 3] - xy[2 * i + 1];
    out[i] = std::hypot(dx, dy);
  }
  for (std::size_t i = 0; i + 2 < n; ++i) {
    const double ux = xy[2 * i + 2] - xy[2 * i];
    const double uy = xy[2 * i + 3] - xy[2 * i + 1];
    const double vx = xy[2 * i + 4] - xy[2 * i + 2];
    const double vy = xy[2 * i + 5] - xy[2 * i + 3];
    out[n - 1 + i] = turning_angle(ux, uy, vx, vy);
  }
}

}  // namespace eqf
