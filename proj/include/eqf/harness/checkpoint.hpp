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

#ifndef EQF__HARNESS__CHECKPOINT_HPP_
#define EQF__HARNESS__CHECKPOINT_HPP_

#include "eqf/config.hpp"
#include "eqf/harness/adam.hpp"
#include "eqf/predictor.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace eqf::harness
{

struct NamedArray
{
  std::string name;
  nd::Array value;

  friend bool operator==(const NamedArray &, const NamedArray &) = default;
};

/**
 * @brief Everything needed to resume training or run inference.
 *
 * Text container:
 *
 *   eqf-checkpoint 1
 *   config <n>            followed by n key=value lines
 *   epoch <e>
 *   adam <step>
 *   param <name> <rank> <dims...> <values...>
 *   first <name> <values...>
 *   second <name> <values...>
 */
struct Checkpoint
{
  Config config;
  std::vector<NamedArray> params;
  AdamState adam;
  std::uint64_t epoch{0};

  friend bool operator==(const Checkpoint &, const Checkpoint &) = default;
};

Checkpoint snapshot(const Model & model, const AdamState & adam, std::uint64_t epoch);

/// Copies stored values into the model; names and shapes must match exactly.
void restore(Model & model, const Checkpoint & checkpoint);

/// Fresh model of the stored configuration carrying the stored values.
Model model_from(const Checkpoint & checkpoint);

void write_checkpoint(std::ostream & out, const Checkpoint & checkpoint);
Checkpoint read_checkpoint(std::istream & in);

void save_checkpoint(const std::filesystem::path & path, const Checkpoint & checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path & path);

}  // namespace eqf::harness

#endif  // EQF__HARNESS__CHECKPOINT_HPP_
