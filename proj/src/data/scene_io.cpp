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

#include "eqf/data/scene_io.hpp"

#include "eqf/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace eqf::data
{

namespace
{

constexpr const char * kMagic = "eqf-scene";
constexpr std::uint64_t kVersion = 1;

void write_pairs(std::ostream & out, std::span<const double> values)
{
  for (double v : values) {
    out << ' ' << format_double(v);
  }
}

/// Reads `count` numbers starting at field `first` into `dst`.
void read_pairs(const Record & r, std::size_t first, std::span<double> dst)
{
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = r.number(first + i);
  }
}

std::size_t expect_index(const Record & r, std::size_t expected, const std::string & what)
{
  const std::size_t got = r.count(1);
  if (got != expected) {
    r.fail(what + " index " + std::to_string(got) + " out of order, expected " + std::to_string(expected));
  }
  return got;
}

}  // namespace

void write_scene(std::ostream & out, const SceneRecord & record)
{
  const Scene & s = record.scene;
  const std::size_t a_count = s.agents();
  const std::size_t t_in = s.t_in();
  const std::size_t t_out = record.truth ? record.truth->t_out() : record.t_out;
  if (record.truth && (record.truth->agents() != a_count || record.truth->agent_mask != s.agent_mask)) {
    throw std::invalid_argument("write_scene: ground truth agents do not match the scene");
  }
  out << kMagic << ' ' << kVersion << '\n';
  out << "dims " << a_count << ' ' << t_in << ' ' << t_out << ' ' << s.lanes() << ' ' << s.lane_points() << ' '
      << format_double(record.sample_rate_hz) << '\n';
  for (std::size_t a = 0; a < a_count; ++a) {
    out << "agent " << a << ' ' << (s.agent_mask[a] ? 1 : 0);
    write_pairs(out, s.histories.data().subspan(a * t_in * 2, t_in * 2));
    out << '\n';
    if (record.truth) {
      out << "future " << a;
      write_pairs(out, record.truth->futures.data().subspan(a * t_out * 2, t_out * 2));
      out << '\n';
    }
  }
  const std::size_t k = s.lane_points();
  for (std::size_t l = 0; l < s.lanes(); ++l) {
    out << "lane " << l << ' ' << (s.lane_mask[l] ? 1 : 0);
    write_pairs(out, s.map.data().subspan(l * k * 2, k * 2));
    out << '\n';
  }
}

SceneRecord read_scene(std::istream & in)
{
  RecordReader reader(in);
  const auto magic = reader.require("scene header");
  magic.expect_keyword(kMagic);
  magic.expect_fields(2, "scene header");
  if (magic.u64(1) != kVersion) {
    magic.fail("unsupported scene format version " + magic.fields[1]);
  }
  const auto dims = reader.require("dims line");
  dims.expect_keyword("dims");
  dims.expect_fields(7, "dims (A T_in T_out L K hz)");
  const std::size_t a_count = dims.count(1);
  const std::size_t t_in = dims.count(2);
  const std::size_t t_out = dims.count(3);
  const std::size_t lanes = dims.count(4);
  const std::size_t k = dims.count(5);
  if (a_count == 0 || t_in == 0 || t_out == 0 || k == 0) {
    dims.fail("A, T_in, T_out and K must be positive");
  }

  SceneRecord rec;
  rec.t_out = t_out;
  rec.sample_rate_hz = dims.number(6);
  rec.scene.histories = nd::Array({a_count, t_in, 2});
  rec.scene.agent_mask.assign(a_count, false);
  rec.scene.map = nd::Array({lanes, k, 2});
  rec.scene.lane_mask.assign(lanes, false);

  bool has_truth = false;
  for (std::size_t a = 0; a < a_count; ++a) {
    const auto r =
      reader.require("agent block " + std::to_string(a + 1) + " of " + std::to_string(a_count));
    if (r.fields[0] != "agent") {
      r.fail(
        "expected agent block " + std::to_string(a + 1) + " of " + std::to_string(a_count) + ", found '" +
        r.fields[0] + "'");
    }
    r.expect_fields(3 + 2 * t_in, "agent block");
    expect_index(r, a, "agent");
    rec.scene.agent_mask[a] = r.flag(2);
    read_pairs(r, 3, rec.scene.histories.data().subspan(a * t_in * 2, t_in * 2));

    const auto next = reader.peek_keyword();
    const bool future_here = next && *next == "future";
    if (a == 0) {
      has_truth = future_here;
      if (has_truth) {
        rec.truth = GroundTruth{nd::Array({a_count, t_out, 2}), std::vector<bool>(a_count, false)};
      }
    }
    if (future_here != has_truth) {
      reader.require("future").fail(
        has_truth ? "missing future block for agent " + std::to_string(a)
                  : "future block present for some agents only");
    }
    if (has_truth) {
      const auto f = reader.require("future block");
      f.expect_fields(2 + 2 * t_out, "future block");
      expect_index(f, a, "future");
      rec.truth->agent_mask[a] = rec.scene.agent_mask[a];
      read_pairs(f, 2, rec.truth->futures.data().subspan(a * t_out * 2, t_out * 2));
    }
  }
  for (std::size_t l = 0; l < lanes; ++l) {
    const auto r = reader.require("lane block " + std::to_string(l + 1) + " of " + std::to_string(lanes));
    if (r.fields[0] != "lane") {
      r.fail(
        "expected lane block " + std::to_string(l + 1) + " of " + std::to_string(lanes) + ", found '" +
        r.fields[0] + "'");
    }
    r.expect_fields(3 + 2 * k, "lane block");
    expect_index(r, l, "lane");
    rec.scene.lane_mask[l] = r.flag(2);
    read_pairs(r, 3, rec.scene.map.data().subspan(l * k * 2, k * 2));
  }
  if (const auto extra = reader.next()) {
    extra->fail("unexpected trailing record '" + extra->fields[0] + "'");
  }
  return rec;
}

void save_scene(const std::filesystem::path & path, const SceneRecord & record)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  write_scene(out, record);
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

SceneRecord load_scene(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  try {
    return read_scene(in);
  } catch (const FormatError & e) {
    throw FormatError(e.line(), e.message(), path.string());
  }
}

std::vector<std::filesystem::path> list_scene_files(const std::filesystem::path & dir)
{
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto & entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".scene") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<SceneRecord> load_scene_dir(const std::filesystem::path & dir)
{
  std::vector<SceneRecord> out;
  for (const auto & f : list_scene_files(dir)) {
    out.push_back(load_scene(f));
  }
  return out;
}

void save_scene_dir(const std::filesystem::path & dir, const std::vector<SceneRecord> & records)
{
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < records.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%06zu.scene", i);
    save_scene(dir / name, records[i]);
  }
}

}  // namespace eqf::data
