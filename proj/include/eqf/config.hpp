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

#ifndef EQF__CONFIG_HPP_
#define EQF__CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace eqf
{

/// How lane polylines enter the model.
enum class MapMode { kNone, kRaw, kInvariant };

const char * to_string(MapMode mode);
MapMode parse_map_mode(const std::string & text);

class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/**
 * @brief Model shape, objective weight and training schedule.
 *
 * Defaults are the full-size setting: 2 s of history and 3 s of future at
 * 10 Hz, four agents, ten 100-point centerlines, six heads, twenty feature
 * cycles of width 64.
 */
struct Config
{
  std::size_t t_in{20};
  std::size_t t_out{30};
  std::size_t agents{4};
  std::size_t lanes{10};
  std::size_t lane_points{100};
  std::size_t heads{6};
  std::size_t cycles{20};
  std::size_t hidden{64};
  double beta{0.5};
  double learning_rate{1e-5};
  std::size_t epochs{50};
  std::size_t batch_size{512};
  MapMode map_mode{MapMode::kInvariant};
  std::uint64_t seed{0};
  double miss_threshold{2.0};
  double sample_rate_hz{10.0};
  std::size_t checkpoint_every{0};  //!< 0 writes only the final checkpoint.

  /// Geometric channel count; one channel per history step.
  std::size_t channels() const { return t_in; }

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  /// Smallest setting used for exhaustive finite-difference checks.
  static Config tiny();

  friend bool operator==(const Config &, const Config &) = default;
};

/// Flat `key=value` lines, one per field, doubles with 17 significant digits.
std::string to_key_values(const Config & config);

/**
 * @brief Parses `key=value` lines over the defaults.
 *
 * Blank lines and `#` comments are skipped; unknown keys and malformed values
 * raise ConfigError with the line number.
 */
Config parse_config(const std::string & text);

Config load_config(const std::string & path);

/// 17-significant-digit decimal, enough to round-trip any double.
std::string format_double(double value);

}  // namespace eqf

#endif  // EQF__CONFIG_HPP_
