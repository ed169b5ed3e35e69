// Copyright 2026 The commbench Authors
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

#pragma once

// Small text helpers shared by the bundle, config and cube readers.

#include <charconv>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace commbench {

std::string_view trim(std::string_view s);

/// Drops everything from the first '#'.
std::string_view strip_comment(std::string_view line);

/// Whitespace-separated fields.
std::vector<std::string_view> split_fields(std::string_view line);

/// Fields separated by `sep`, each trimmed.
std::vector<std::string_view> split_on(std::string_view s, char sep);

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    if (s.front() == '+') s.remove_prefix(1);
  }
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

/// Shortest decimal representation that round-trips exactly.
std::string format_double(double x);

/// Fixed-precision rendering for human-facing tables.
/// Quotes a CSV field when it holds a separator, quote, line break or edge space.
std::string csv_quote(const std::string& s);

std::string format_fixed(double x, int digits);

/// Reads "key = value" lines; '#' starts a comment. Duplicate keys keep the
/// last value. Throws kLoad when the file cannot be opened and kParse on a
/// line without '='.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

/// Same as read_key_values, but keeps repeated keys in file order.
std::vector<std::pair<std::string, std::string>> read_key_value_list(
    const std::filesystem::path& path);

/// Writes `contents` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// Fresh directory under the system temp dir, removed with its contents when
/// the object is destroyed.
class TempDir {
 public:
  explicit TempDir(std::string_view prefix);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace commbench
