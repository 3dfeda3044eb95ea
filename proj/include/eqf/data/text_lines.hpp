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

#ifndef EQF__DATA__TEXT_LINES_HPP_
#define EQF__DATA__TEXT_LINES_HPP_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eqf::data
{

/// Malformed input; what() reads "[source: ]line N: message".
class FormatError : public std::runtime_error
{
public:
  FormatError(std::size_t line, const std::string & message, const std::string & source = {});
  std::size_t line() const { return line_; }
  /// The message without the location prefix.
  const std::string & message() const { return message_; }

private:
  std::size_t line_;
  std::string message_;
};

/// One whitespace-separated record and where it came from.
struct Record
{
  std::size_t line{0};
  std::vector<std::string> fields;

  [[noreturn]] void fail(const std::string & message) const;
  /// Throws unless the record has exactly `count` fields.
  void expect_fields(std::size_t count, const std::string & what) const;
  /// Throws unless field 0 equals `keyword`.
  void expect_keyword(std::string_view keyword) const;

  double number(std::size_t index) const;
  std::size_t count(std::size_t index) const;
  std::uint64_t u64(std::size_t index) const;
  bool flag(std::size_t index) const;
};

/// Yields non-blank records, skipping lines that start with '#'.
class RecordReader
{
public:
  explicit RecordReader(std::istream & in) : in_(in) {}

  std::optional<Record> next();
  /// Next record or a FormatError naming `expectation` at end of input.
  Record require(const std::string & expectation);
  /// Peeks at the keyword of the next record without consuming it.
  std::optional<std::string> peek_keyword();
  std::size_t line() const { return line_; }

private:
  std::istream & in_;
  std::size_t line_{0};
  std::optional<Record> pending_;
};

/// Exact decimal parse of a whole token; nullopt on any trailing characters.
std::optional<double> parse_double(std::string_view text);
std::optional<std::uint64_t> parse_u64(std::string_view text);

}  // namespace eqf::data

#endif  // EQF__DATA__TEXT_LINES_HPP_
