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

#ifndef EQF__HARNESS__FORECAST_IO_HPP_
#define EQF__HARNESS__FORECAST_IO_HPP_

#include "eqf/scene.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

/**
 * Forecast files.
 *
 *   eqf-forecast 1
 *   dims A H T_out
 *   agent <i> <mask> <selected head>
 *   head <i> <h> <probability> <T_out x y pairs>     (H lines per agent)
 */
namespace eqf::harness
{

struct ForecastRecord
{
  ForecastSet forecast;
  std::vector<bool> agent_mask;
  std::vector<std::size_t> selected;  //!< max-probability head per agent

  friend bool operator==(const ForecastRecord &, const ForecastRecord &) = default;
};

/// Pairs a forecast with its scene's mask and the max-probability selection.
ForecastRecord make_forecast_record(const ForecastSet & forecast, const std::vector<bool> & agent_mask);

void write_forecast(std::ostream & out, const ForecastRecord & record);
ForecastRecord read_forecast(std::istream & in);

void save_forecast(const std::filesystem::path & path, const ForecastRecord & record);
ForecastRecord load_forecast(const std::filesystem::path & path);

}  // namespace eqf::harness

#endif  // EQF__HARNESS__FORECAST_IO_HPP_
