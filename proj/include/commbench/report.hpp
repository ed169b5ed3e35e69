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

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "commbench/concordance.hpp"

namespace commbench {

/// Seed statistics of one (algorithm, test): mean and population standard
/// deviation over ok cells, plus failure counts by reason.
struct CellSummary {
  std::optional<double> mean;  // absent when no cell is ok
  double std = 0.0;
  std::size_t ok = 0;
  std::size_t failed = 0;
  std::map<FailureReason, std::size_t> reasons;
};

CellSummary summarize(const ResultsCube& cube, std::size_t algorithm, std::size_t test);

/// Writes results.md, concordance.md, metrics.csv and concordance.csv into
/// `out_dir`, plus summary.md and summary.csv when `cmp` is given (layouts in
/// docs/formats.md). Returns the paths written. Throws kValidation for an
/// empty cube and kIo when the directory cannot be written.
std::vector<std::filesystem::path> emit_report(const ResultsCube& cube, const ConcordanceReport& concord,
                                               const std::optional<RegimeComparison>& cmp,
                                               const std::filesystem::path& out_dir);

}  // namespace commbench
