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

#include "eqf/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace eqf
{

const char * to_string(MapMode mode)
{
  switch (mode) {
    case MapMode::kNone: return "none";
    case MapMode::kRaw: return "raw";
    case MapMode::kInvariant: return "invariant";
  }
  return "?";
}

MapMode parse_map_mode(const std::string & text)
{
  if (text == "none") {
    return MapMode::kNone;
  }
  if (text == "raw") {
    return MapMode::kRaw;
  }
  if (text == "invariant") {
    return MapMode::kInvariant;
  }
  throw ConfigError("unknown map mode '" + text + "' (expected none, raw or invariant)");
}

std::string format_double(double value)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void Config::validate() const
{
  auto positive = [](std::size_t v, const char * name) {
    if (v == 0) {
      throw ConfigError(std::string(name) + " must be positive");
    }
  };
  positive(t_in, "T_in");
  positive(t_out, "T_out");
  positive(agents, "A");
  positive(lanes, "L");
  positive(heads, "H");
  positive(cycles, "Q");
  positive(hidden, "hidden_dim");
  positive(epochs, "epochs");
  positive(batch_size, "batch_size");
  if (t_in < 3) {
    throw ConfigError("T_in must be at least 3 (turning angles need two displacements)");
  }
  if (lane_points < 3) {
    throw ConfigError("K must be at least 3");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ConfigError("beta must lie in [0, 1]");
  }
  if (!(learning_rate > 0.0)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (!(miss_threshold > 0.0)) {
    throw ConfigError("miss_threshold must be positive");
  }
  if (!(sample_rate_hz > 0.0)) {
    throw ConfigError("sample_rate_hz must be positive");
  }
}

Config Config::tiny()
{
  Config c;
  c.agents = 2;
  c.t_in = 4;
  c.t_out = 3;
  c.heads = 2;
  c.cycles = 2;
  c.hidden = 8;
  c.lanes = 2;
  c.lane_points = 5;
  return c;
}

std::string to_key_values(const Config & c)
{
  std::ostringstream os;
  os << "T_in=" << c.t_in << '\n'
     << "T_out=" << c.t_out << '\n'
     << "A=" << c.agents << '\n'
     << "L=" << c.lanes << '\n'
     << "K=" << c.lane_points << '\n'
     << "H=" << c.heads << '\n'
     << "Q=" << c.cycles << '\n'
     << "hidden_dim=" << c.hidden << '\n'
     << "beta=" << format_double(c.beta) << '\n'
     << "learning_rate=" << format_double(c.learning_rate) << '\n'
     << "epochs=" << c.epochs << '\n'
     << "batch_size=" << c.batch_size << '\n'
     << "map_mode=" << to_string(c.map_mode) << '\n'
     << "seed=" << c.seed << '\n'
     << "miss_threshold=" << format_double(c.miss_threshold) << '\n'
     << "sample_rate_hz=" << format_double(c.sample_rate_hz) << '\n'
     << "checkpoint_every=" << c.checkpoint_every << '\n';
  return os.str();
}

namespace
{

std::string trim(const std::string & s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string & text, int line)
{
  T value{};
  const char * end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("line " + std::to_string(line) + ": malformed number '" + text + "'");
  }
  return value;
}

}  // namespace

Config parse_config(const std::string & text)
{
  Config c;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string entry = trim(raw.substr(0, raw.find('#')));
    if (entry.empty()) {
      continue;
    }
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected key=value");
    }
    const std::string key = trim(entry.substr(0, eq));
    const std::string value = trim(entry.substr(eq + 1));
    auto size = [&] { return parse_number<std::size_t>(value, line); };
    auto real = [&] { return parse_number<double>(value, line); };
    if (key == "T_in") {
      c.t_in = size();
    } else if (key == "T_out") {
      c.t_out = size();
    } else if (key == "A") {
      c.agents = size();
    } else if (key == "L") {
      c.lanes = size();
    } else if (key == "K") {
      c.lane_points = size();
    } else if (key == "H") {
      c.heads = size();
    } else if (key == "Q") {
      c.cycles = size();
    } else if (key == "hidden_dim") {
      c.hidden = size();
    } else if (key == "beta") {
      c.beta = real();
    } else if (key == "learning_rate") {
      c.learning_rate = real();
    } else if (key == "epochs") {
      c.epochs = size();
    } else if (key == "batch_size") {
      c.batch_size = size();
    } else if (key == "map_mode") {
      c.map_mode = parse_map_mode(value);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(value, line);
    } else if (key == "miss_threshold") {
      c.miss_threshold = real();
    } else if (key == "sample_rate_hz") {
      c.sample_rate_hz = real();
    } else if (key == "checkpoint_every") {
      c.checkpoint_every = size();
    } else {
      throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

Config load_config(const std::string & path)
{
  std::ifstream file(path);
  if (!file) {
    throw ConfigError("cannot open config file " + path);
  }
  std::ostringstream os;
  os << file.rdbuf();
  return parse_config(os.str());
}

}  // namespace eqf
