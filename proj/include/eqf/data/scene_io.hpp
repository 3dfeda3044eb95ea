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

#ifndef EQF__DATA__SCENE_IO_HPP_
#define EQF__DATA__SCENE_IO_HPP_

#include "eqf/data/text_lines.hpp"
#include "eqf/scene.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

/**
 * Scene files.
 *
 *   eqf-scene 1
 *   dims A T_in T_out L K hz
 *   agent <i> <mask> <T_in x y pairs>
 *   future <i> <T_out x y pairs>        (after every agent line, or never)
 *   lane <l> <mask> <K x y pairs>
 *
 * Numbers carry 17 significant digits so a write/read cycle is exact.
 */
namespace eqf::data
{

struct SceneRecord
{
  Scene scene;
  std::optional<GroundTruth> truth;
  std::size_t t_out{0};
  double sample_rate_hz{10.0};
};

void write_scene(std::ostream & out, const SceneRecord & record);
SceneRecord read_scene(std::istream & in);

void save_scene(const std::filesystem::path & path, const SceneRecord & record);
SceneRecord load_scene(const std::filesystem::path & path);

/// Every `*.scene` file of a directory in lexicographic order.
std::vector<std::filesystem::path> list_scene_files(const std::filesystem::path & dir);
std::vector<SceneRecord> load_scene_dir(const std::filesystem::path & dir);
/// Writes scene_000000.scene, scene_000001.scene, ...; creates the directory.
void save_scene_dir(const std::filesystem::path & dir, const std::vector<SceneRecord> & records);

}  // namespace eqf::data

#endif  // EQF__DATA__SCENE_IO_HPP_
