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

#ifndef EQF__HARNESS__SVG_PLOT_HPP_
#define EQF__HARNESS__SVG_PLOT_HPP_

#include "eqf/data/scene_io.hpp"
#include "eqf/harness/forecast_io.hpp"

#include <optional>
#include <string>

namespace eqf::harness
{

struct PlotStyle
{
  double width{800.0};
  double height{800.0};
  double margin{40.0};
};

/**
 * @brief Standalone SVG of a scene and, optionally, its forecast.
 *
 * Lanes go in one group; each valid agent gets a `<g class="agent">` holding
 * a solid history polyline, a solid ground-truth polyline when present, one
 * dotted series of circle markers per head and a probability label at each
 * head's endpoint. The ego agent (slot 0) is drawn in red and thicker.
 * Throws std::invalid_argument when the forecast's agent count or mask
 * disagrees with the scene.
 */
std::string render_svg(
  const data::SceneRecord & scene, const std::optional<ForecastRecord> & forecast, const PlotStyle & style = {});

}  // namespace eqf::harness

#endif  // EQF__HARNESS__SVG_PLOT_HPP_
