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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "commbench/metrics.hpp"

namespace commbench {

enum class FailureReason { kOom, kTimeout, kCrash, kNonfinite };

std::string_view to_string(FailureReason r);
std::optional<FailureReason> parse_failure_reason(std::string_view name);

/// One cube entry: a finite value or a failure marker.
struct Cell {
  double value = 0.0;
  std::optional<FailureReason> failure;

  static Cell ok(double v) { return {v, std::nullopt}; }
  static Cell failed(FailureReason r) { return {0.0, r}; }
  bool is_ok() const { return !failure.has_value(); }

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// A test is one metric measured on one dataset.
struct TestPoint {
  std::string dataset;
  Metric metric = Metric::kF1;

  friend bool operator==(const TestPoint&, const TestPoint&) = default;
};

std::string to_string(const TestPoint& t);

/// Performance values indexed by (algorithm, seed, test).
class ResultsCube {
 public:
  ResultsCube() = default;
  ResultsCube(std::vector<std::string> algorithms, std::vector<std::int64_t> seeds,
              std::vector<TestPoint> tests);

  const std::vector<std::string>& algorithms() const { return algorithms_; }
  const std::vector<std::int64_t>& seeds() const { return seeds_; }
  const std::vector<TestPoint>& tests() const { return tests_; }

  void set(std::size_t algorithm, std::size_t seed, std::size_t test, Cell cell);
  /// Throws kValidation when the cell was never set.
  const Cell& at(std::size_t algorithm, std::size_t seed, std::size_t test) const;
  bool has(std::size_t algorithm, std::size_t seed, std::size_t test) const;
  bool is_complete() const;
  std::size_t cell_count() const { return cells_.size(); }

  std::optional<std::size_t> algorithm_index(std::string_view name) const;

  friend bool operator==(const ResultsCube&, const ResultsCube&) = default;

 private:
  std::size_t index(std::size_t a, std::size_t s, std::size_t t) const {
    return (a * seeds_.size() + s) * tests_.size() + t;
  }

  std::vector<std::string> algorithms_;
  std::vector<std::int64_t> seeds_;
  std::vector<TestPoint> tests_;
  std::vector<std::optional<Cell>> cells_;
};

struct SeedRanks {
  std::vector<double> ranks;
  bool all_failed = false;
};

/// Rank 1 is best under `orient`; ties share the average of the ranks they
/// span; failed cells share the worst ranks.
SeedRanks rank_within_seed(std::span<const Cell> values, Orientation orient);

/// n seeds x a algorithms, row-major.
struct RankMatrix {
  std::size_t seeds = 0;
  std::size_t algorithms = 0;
  std::vector<double> ranks;

  double at(std::size_t s, std::size_t a) const { return ranks[s * algorithms + a]; }
};

struct KendallW {
  double w = 0.0;
  double s = 0.0;  // sum of squared deviations of rank totals
};

/// Kendall's coefficient of concordance 12S / (n^2 (a^3 - a)), clamped to
/// [0, 1]. With `tie_corrected`, the denominator subtracts n * sum(t^3 - t)
/// over tie groups. Throws kUndefinedInput when n < 2 or a < 2.
KendallW kendall_w(const RankMatrix& ranks, bool tie_corrected = false);

/// Share of within-seed algorithm pairs whose ranks are tied.
double tie_fraction(const RankMatrix& ranks);

RankMatrix rank_matrix(const ResultsCube& cube, std::size_t test);

struct TestConcordance {
  TestPoint test;
  double w = 0.0;
  double s = 0.0;
  double w_tie_corrected = 0.0;
  double tie_fraction = 0.0;
  std::size_t all_failed_seeds = 0;
};

struct ConcordanceReport {
  std::vector<TestConcordance> per_test;
  /// 1 - mean over tests of W; lower means rankings agree across seeds.
  double w_randomness = 0.0;
  /// Population standard deviation of the per-test W values.
  double w_std = 0.0;
  double overall_tie_fraction = 0.0;
  /// Filled when more than 10% of within-seed comparisons are ties.
  std::optional<double> w_randomness_tie_corrected;
};

ConcordanceReport w_randomness_coefficient(const ResultsCube& cube);

struct ComparisonEntry {
  TestPoint test;
  std::string algorithm;
  double reduced[2] = {0.0, 0.0};
  double rank[2] = {0.0, 0.0};
};

struct ComparisonReport {
  std::string contender[2];
  double mean_rank[2] = {0.0, 0.0};
  double std_rank[2] = {0.0, 0.0};
  std::vector<ComparisonEntry> entries;
  /// The same comparison made cell by cell, without reducing seeds first.
  double per_seed_mean_rank[2] = {0.0, 0.0};
  double per_seed_std_rank[2] = {0.0, 0.0};
};

enum class SeedReduction { kMean };

/// Head-to-head rank of two parameter regimes on every (test, algorithm).
/// Throws kAlignment when the cubes' axes differ.
ComparisonReport framework_comparison_rank(const ResultsCube& a, const ResultsCube& b,
                                           std::string name_a = "A", std::string name_b = "B",
                                           SeedReduction reduce = SeedReduction::kMean);

/// Default-vs-HPO summary.
struct RegimeComparison {
  ComparisonReport fcr;           // contender 0: default, 1: hpo
  ConcordanceReport default_w;
  ConcordanceReport hpo_w;
};

}  // namespace commbench
