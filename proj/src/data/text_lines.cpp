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

#include "eqf/data/text_lines.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace eqf::data
{

FormatError::FormatError(std::size_t line, const std::string & message, const std::string & source)
: std::runtime_error(
    (source.empty() ? std::string() : source + ": ") + "line " + std::to_string(line) + ": " + message),
  line_(line),
  message_(message)
{
}

void Record::fail(const std::string & message) const { throw FormatError(line, message); }

void Record::expect_fields(std::size_t count, const std::string & what) const
{
  if (fields.size() != count) {
    fail(
      "expected " + std::to_string(count) + " fields for " + what + ", found " + std::to_string(fields.size()));
  }
}

void Record::expect_keyword(std::string_view keyword) const
{
  if (fields.empty() || fields[0] != keyword) {
    fail("expected '" + std::string(keyword) + "', found '" + (fields.empty() ? "" : fields[0]) + "'");
  }
}

double Record::number(std::size_t index) const
{
  const auto v = parse_double(fields.at(index));
  if (!v || !std::isfinite(*v)) {
    fail("field " + std::to_string(index + 1) + " is not a finite number: '" + fields[index] + "'");
  }
  return *v;
}

std::size_t Record::count(std::size_t index) const { return static_cast<std::size_t>(u64(index)); }

std::uint64_t Record::u64(std::size_t index) const
{
  const auto v = parse_u64(fields.at(index));
  if (!v) {
    fail("field " + std::to_string(index + 1) + " is not a non-negative integer: '" + fields[index] + "'");
  }
  return *v;
}

bool Record::flag(std::size_t index) const
{
  const auto & f = fields.at(index);
  if (f != "0" && f != "1") {
    fail("field " + std::to_string(index + 1) + " must be 0 or 1, found '" + f + "'");
  }
  return f == "1";
}

std::optional<Record> RecordReader::next()
{
  if (pending_) {
    auto r = std::move(*pending_);
    pending_.reset();
    return r;
  }
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    std::istringstream tokens(text);
    Record r;
    r.line = line_;
    std::string tok;
    while (tokens >> tok) {
      r.fields.push_back(tok);
    }
    if (r.fields.empty() || r.fields[0].starts_with('#')) {
      continue;
    }
    return r;
  }
  return std::nullopt;
}

Record RecordReader::require(const std::string & expectation)
{
  auto r = next();
  if (!r) {
    throw FormatError(line_ + 1, "unexpected end of input, expected " + expectation);
  }
  return std::move(*r);
}

std::optional<std::string> RecordReader::peek_keyword()
{
  if (!pending_) {
    pending_ = next();
  }
  if (!pending_) {
    return std::nullopt;
  }
  return pending_->fields[0];
}

std::optional<double> parse_double(std::string_view text)
{
  double v = 0.0;
  const auto * end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    return std::nullopt;
  }
  return v;
}

std::optional<std::uint64_t> parse_u64(std::string_view text)
{
  std::uint64_t v = 0;
  const auto * end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    return std::nullopt;
  }
  return v;
}

}  // namespace eqf::data
