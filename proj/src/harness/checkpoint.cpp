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

#include "eqf/harness/checkpoint.hpp"

#include "eqf/data/text_lines.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

namespace eqf::harness
{

namespace
{

constexpr const char * kMagic = "eqf-checkpoint";
constexpr std::uint64_t kVersion = 1;

void write_values(std::ostream & out, const nd::Array & a)
{
  for (double v : a.data()) {
    out << ' ' << format_double(v);
  }
}

nd::Array read_values(const data::Record & r, std::size_t first, const nd::Shape & shape)
{
  const std::size_t n = nd::numel(shape);
  r.expect_fields(first + n, "values of '" + r.fields.at(1) + "'");
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = r.number(first + i);
  }
  return nd::Array(shape, std::move(values));
}

}  // namespace

Checkpoint snapshot(const Model & model, const AdamState & adam, std::uint64_t epoch)
{
  Checkpoint c;
  c.config = model.config();
  for (const auto & e : model.params().entries()) {
    c.params.push_back({e.name, e.var.value()});
  }
  c.adam = adam;
  c.epoch = epoch;
  return c;
}

void restore(Model & model, const Checkpoint & checkpoint)
{
  const auto & entries = model.params().entries();
  if (entries.size() != checkpoint.params.size()) {
    throw std::invalid_argument(
      "checkpoint has " + std::to_string(checkpoint.params.size()) + " parameters, model expects " +
      std::to_string(entries.size()));
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto & stored = checkpoint.params[i];
    if (stored.name != entries[i].name || stored.value.shape() != entries[i].var.shape()) {
      throw std::invalid_argument(
        "checkpoint parameter '" + stored.name + "' " + nd::to_string(stored.value.shape()) +
        " does not match model parameter '" + entries[i].name + "' " + nd::to_string(entries[i].var.shape()));
    }
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    nd::Var v = entries[i].var;
    v.mutable_leaf_value() = checkpoint.params[i].value;
  }
}

Model model_from(const Checkpoint & checkpoint)
{
  Model model(checkpoint.config);
  restore(model, checkpoint);
  return model;
}

void write_checkpoint(std::ostream & out, const Checkpoint & checkpoint)
{
  const bool with_moments = !checkpoint.adam.first.empty();
  if (with_moments && (checkpoint.adam.first.size() != checkpoint.params.size() ||
                       checkpoint.adam.second.size() != checkpoint.params.size())) {
    throw std::invalid_argument("checkpoint: optimizer moments do not align with parameters");
  }
  out << kMagic << ' ' << kVersion << '\n';
  std::string config_text = to_key_values(checkpoint.config);
  const auto lines = static_cast<std::size_t>(std::count(config_text.begin(), config_text.end(), '\n'));
  out << "config " << lines << '\n' << config_text;
  out << "epoch " << checkpoint.epoch << '\n';
  out << "adam " << checkpoint.adam.step << ' ' << (with_moments ? 1 : 0) << '\n';
  for (const auto & p : checkpoint.params) {
    out << "param " << p.name << ' ' << p.value.rank();
    for (std::size_t d : p.value.shape()) {
      out << ' ' << d;
    }
    write_values(out, p.value);
    out << '\n';
  }
  if (with_moments) {
    for (std::size_t i = 0; i < checkpoint.params.size(); ++i) {
      out << "first " << checkpoint.params[i].name;
      write_values(out, checkpoint.adam.first[i]);
      out << '\n';
      out << "second " << checkpoint.params[i].name;
      write_values(out, checkpoint.adam.second[i]);
      out << '\n';
    }
  }
}

Checkpoint read_checkpoint(std::istream & in)
{
  data::RecordReader reader(in);
  const auto head = reader.require("checkpoint header");
  head.expect_keyword(kMagic);
  head.expect_fields(2, "checkpoint header");
  if (head.u64(1) != kVersion) {
    head.fail("unsupported checkpoint version " + head.fields[1]);
  }
  const auto cfg = reader.require("config line");
  cfg.expect_keyword("config");
  cfg.expect_fields(2, "config line");
  std::string text;
  for (std::size_t i = 0, n = cfg.count(1); i < n; ++i) {
    const auto line = reader.require("config entry");
    line.expect_fields(1, "config entry");
    text += line.fields[0] + '\n';
  }
  Checkpoint c;
  try {
    c.config = parse_config(text);
  } catch (const ConfigError & e) {
    cfg.fail(std::string("config block: ") + e.what());
  }
  const auto epoch = reader.require("epoch line");
  epoch.expect_keyword("epoch");
  epoch.expect_fields(2, "epoch line");
  c.epoch = epoch.u64(1);
  const auto adam = reader.require("adam line");
  adam.expect_keyword("adam");
  adam.expect_fields(3, "adam line");
  c.adam.step = adam.u64(1);
  const bool with_moments = adam.flag(2);

  while (reader.peek_keyword() == std::optional<std::string>("param")) {
    const auto r = reader.require("param");
    if (r.fields.size() < 3) {
      r.fail("param line needs a name and a rank");
    }
    const std::size_t rank = r.count(2);
    if (r.fields.size() < 3 + rank) {
      r.fail("param line truncated inside its shape");
    }
    nd::Shape shape;
    for (std::size_t d = 0; d < rank; ++d) {
      shape.push_back(r.count(3 + d));
    }
    c.params.push_back({r.fields[1], read_values(r, 3 + rank, shape)});
  }
  if (with_moments) {
    for (const auto & p : c.params) {
      for (const char * kind : {"first", "second"}) {
        const auto r = reader.require(std::string(kind) + " moment of " + p.name);
        r.expect_keyword(kind);
        if (r.fields.size() < 2 || r.fields[1] != p.name) {
          r.fail("expected " + std::string(kind) + " moment of '" + p.name + "'");
        }
        (std::string(kind) == "first" ? c.adam.first : c.adam.second).push_back(read_values(r, 2, p.value.shape()));
      }
    }
  }
  if (const auto extra = reader.next()) {
    extra->fail("unexpected trailing record '" + extra->fields[0] + "'");
  }
  return c;
}

void save_checkpoint(const std::filesystem::path & path, const Checkpoint & checkpoint)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  write_checkpoint(out, checkpoint);
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  try {
    return read_checkpoint(in);
  } catch (const data::FormatError & e) {
    throw data::FormatError(e.line(), e.message(), path.string());
  }
}

}  // namespace eqf::harness
