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

#ifndef EQF__DATA__CSV_INGEST_HPP_
#define EQF__DATA__CSV_INGEST_HPP_

#include "eqf/config.hpp"
#include "eqf/data/scene_io.hpp"

#include <filesystem>
#include <string>
#include <vector>

/**
 * Benchmark-style trajectory CSVs, one scene per file.
 *
 * The header names the columns; matching is case-insensitive and extra
 * columns are ignored. Required: timestamp, track_id, x, y. The focal track
 * is flagged either by an object_type column equal to AGENT or by a focal
 * column equal to 1; exactly one track must be flagged.
 *
 * The focal track's first timestamp anchors a grid of T_in + T_out steps at
 * the configured rate; every track is linearly interpolated onto it. Other
 * tracks must span the whole grid to be considered, and the A - 1 nearest to
 * the focal agent at the last observed step are kept (ties by track id).
 *
 * An optional sidecar `<stem>.lanes.csv` with columns lane_id, x, y supplies
 * centerlines, resampled to K points by arc length; the L lanes closest to
 * the focal agent's last observed position are kept.
 */
namespace eqf::data
{

struct IngestResult
{
  std::vector<SceneRecord> records;
  std::size_t skipped{0};
  std::vector<std::string> warnings;
};

/// One CSV file; a focal track too short for the grid is skipped with a warning.
IngestResult ingest_csv(const std::filesystem::path & path, const Config & config);

/// Every `*.csv` in a directory except lane sidecars, in lexicographic order.
IngestResult ingest_csv_dir(const std::filesystem::path & dir, const Config & config);

/// `count` points evenly spaced by arc length along a polyline.
std::vector<Point> resample_polyline(const std::vector<Point> & points, std::size_t count);

}  // namespace eqf::data

#endif  // EQF__DATA__CSV_INGEST_HPP_
