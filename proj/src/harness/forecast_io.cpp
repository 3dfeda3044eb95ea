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

#include "eqf/harness/forecast_io.hpp"

#include "eqf/config.hpp"
#include "eqf/data/text_lines.hpp"
#include "eqf/predictor.hpp"

#include <fstream>
#include <ostream>

namespace eqf::harness
{

namespace
{

constexpr const char * kMagic = "eqf-forecast";
constexpr std::uint64_t kVersion = 1;

}  // namespace

ForecastRecord make_forecast_record(const ForecastSet & forecast, const std::vector<bool> & agent_mask)
{
  if (agent_mask.size() != forecast.agents()) {
    throw std::invalid_argument("forecast record: mask size differs from the agent count");
  }
  ForecastRecord r{forecast, agent_mask, {}};
  if (forecast.heads() == 0) {
    r.selected.assign(forecast.agents(), 0);
    return r;
  }
  for (const auto & s : select_trajectory(forecast)) {
    r.selected.push_back(s.head);
  }
  return r;
}

void write_forecast(std::ostream & out, const ForecastRecord & record)
{
  const auto & f = record.forecast;
  const std::size_t agents = f.agents();
  const std::size_t heads = f.heads();
  const std::size_t steps = f.t_out();
  if (record.agent_mask.size() != agents || record.selected.size() != agents) {
    throw std::invalid_argument("write_forecast: mask or selection size differs from the agent count");
  }
  out << kMagic << ' ' << kVersion << '\n';
  out << "dims " << agents << ' ' << heads << ' ' << steps << '\n';
  for (std::size_t a = 0; a < agents; ++a) {
    out << "agent " << a << ' ' << (record.agent_mask[a] ? 1 : 0) << ' ' << record.selected[a] << '\n';
    for (std::size_t h = 0; h < heads; ++h) {
      out << "head " << a << ' ' << h << ' ' << format_double(f.probabilities[a * heads + h]);
      for (std::size_t t = 0; t < steps; ++t) {
        const Point p = f.point(a, h, t);
        out << ' ' << format_double(p.x) << ' ' << format_double(p.y);
      }
      out << '\n';
    }
  }
}

ForecastRecord read_forecast(std::istream & in)
{
  data::RecordReader reader(in);
  const auto head = reader.require("forecast header");
  head.expect_keyword(kMagic);
  head.expect_fields(2, "forecast header");
  if (head.u64(1) != kVersion) {
    head.fail("unsupported forecast format version " + head.fields[1]);
  }
  const auto dims = reader.require("dims line");
  dims.expect_keyword("dims");
  dims.expect_fields(4, "dims (A H T_out)");
  const std::size_t agents = dims.count(1);
  const std::size_t heads = dims.count(2);
  const std::size_t steps = dims.count(3);

  ForecastRecord r;
  r.forecast.trajectories = nd::Array({agents, heads, steps, 2});
  r.forecast.probabilities = nd::Array({agents, heads});
  r.agent_mask.assign(agents, false);
  r.selected.assign(agents, 0);
  for (std::size_t a = 0; a < agents; ++a) {
    const auto ar = reader.require("agent block " + std::to_string(a + 1) + " of " + std::to_string(agents));
    ar.expect_keyword("agent");
    ar.expect_fields(4, "agent line");
    if (ar.count(1) != a) {
      ar.fail("agent index " + ar.fields[1] + " out of order, expected " + std::to_string(a));
    }
    r.agent_mask[a] = ar.flag(2);
    r.selected[a] = ar.count(3);
    if (heads > 0 && r.selected[a] >= heads) {
      ar.fail("selected head " + ar.fields[3] + " is not below H = " + std::to_string(heads));
    }
    for (std::size_t h = 0; h < heads; ++h) {
      const auto hr = reader.require("head " + std::to_string(h) + " of agent " + std::to_string(a));
      hr.expect_keyword("head");
      hr.expect_fields(4 + 2 * steps, "head line");
      if (hr.count(1) != a || hr.count(2) != h) {
        hr.fail("head line out of order, expected agent " + std::to_string(a) + " head " + std::to_string(h));
      }
      r.forecast.probabilities[a * heads + h] = hr.number(3);
      for (std::size_t i = 0; i < 2 * steps; ++i) {
        r.forecast.trajectories[(a * heads + h) * steps * 2 + i] = hr.number(4 + i);
      }
    }
  }
  if (const auto extra = reader.next()) {
    extra->fail("unexpected trailing record '" + extra->fields[0] + "'");
  }
  return r;
}

void save_forecast(const std::filesystem::path & path, const ForecastRecord & record)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  write_forecast(out, record);
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

ForecastRecord load_forecast(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  try {
    return read_forecast(in);
  } catch (const data::FormatError & e) {
    throw data::FormatError(e.line(), e.message(), path.string());
  }
}

}  // namespace eqf::harness
