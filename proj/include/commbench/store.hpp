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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "commbench/concordance.hpp"

namespace commbench {

inline constexpr int kCubeFormatVersion = 1;

/// A results cube as persisted on disk (layout in docs/formats.md).
struct StoredCube {
  int format_version = kCubeFormatVersion;
  std::string fingerprint;             // empty when unknown
  std::optional<std::int64_t> created;  // unix seconds; absent keeps files reproducible
  ResultsCube cube;

  friend bool operator==(const StoredCube&, const StoredCube&) = default;
};

std::string serialize_cube(const StoredCube& stored);
/// `source` names the input in error messages. Throws kParse with the byte
/// offset of the offending line, or kMigration for another format version.
StoredCube parse_cube(std::string_view text, const std::string& source = "cube");

/// Atomic: written to a temporary file in the same directory, then renamed.
void save_cube(const StoredCube& stored, const std::filesystem::path& path);
StoredCube load_cube(const std::filesystem::path& path);

/// Fills the unset cells of `a` from `b`. Fingerprints must match (kValidation),
/// axes must match (kAlignment) and cells set in both must agree (kValidation).
StoredCube merge_cubes(const StoredCube& a, const StoredCube& b);

/// Plain CSV with the header `algorithm,seed,dataset,metric,value`. Values are
/// numbers or FAILED:<reason>. Axes keep first-appearance order.
ResultsCube parse_results_csv(std::string_view text, const std::string& source = "csv");
ResultsCube read_results_csv(const std::filesystem::path& path);
void write_results_csv(const ResultsCube& cube, std::ostream& out);

}  // namespace commbench
