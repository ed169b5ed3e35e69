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
#include <utility>
#include <vector>

#include "commbench/concordance.hpp"
#include "commbench/graph.hpp"
#include "commbench/metrics.hpp"
#include "commbench/runner.hpp"

namespace commbench {

/// Budget and search domains. Defaults are the standard resource table.
struct ResourceConfig {
  std::vector<double> learning_rates{0.05, 0.01, 0.005, 0.001, 0.0005, 0.0001};
  std::vector<double> weight_decays{0.05, 0.005, 0.0005, 0.0};
  std::int64_t max_epochs = 5000;
  std::vector<std::int64_t> patience{25, 100, 500, 1000};
  std::size_t max_trials = 300;
  std::vector<std::int64_t> seeds{42, 24, 976, 12345, 98765, 7, 856, 90, 672, 785};
  double train_fraction = 0.8;
  double val_fraction_of_train = 0.8;
  double timeout_seconds = 3600.0;
  std::uint64_t memory_bytes = 0;
  std::string optimizer = "adam";
};

enum class Mode { kHpo, kDefault };
/// kJoint: one multi-objective study per (runner, dataset) with per-metric
/// selection. kPerTest: one single-objective study per (runner, dataset, metric).
enum class StudyScope { kJoint, kPerTest };

std::string_view to_string(Mode m);
std::string_view to_string(StudyScope s);

/// A bundle on disk, or a planted-partition graph generated on the fly.
struct DatasetSource {
  std::string name;
  std::filesystem::path path;
  std::optional<PlantedPartitionConfig> planted;
  std::uint64_t planted_seed = 0;
};

/// Parses "planted:<name> key=value ..." (keys: nodes, blocks, p_in, p_out,
/// feature_dim, separation, seed). Throws kConfig.
DatasetSource parse_planted_source(std::string_view text);

struct BenchmarkConfig {
  std::vector<DatasetSource> datasets;
  std::vector<RunnerSpec> runners;
  std::vector<Metric> metrics{std::begin(kAllMetrics), std::end(kAllMetrics)};
  ResourceConfig resources;
  Mode mode = Mode::kHpo;
  StudyScope study_scope = StudyScope::kJoint;
  std::size_t workers = 1;
  std::size_t trials_in_flight = 1;
  bool skip_conformance = false;
  std::filesystem::path history_dir;  // empty: study histories are not written

  /// Sorted-key JSON of every setting that can change results; workers and
  /// history_dir are excluded.
  std::string canonical_text() const;
  /// SHA-256 of canonical_text(), lowercase hex.
  std::string fingerprint() const;
};

/// Reads a config file (docs/cli.md). Relative paths resolve against the file's
/// directory. `overrides` are applied after the file, key by key; a repeatable
/// key given as an override replaces every value from the file.
BenchmarkConfig load_benchmark_config(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Builds a config from key/value pairs as if they were lines of a file in
/// `base_dir`.
BenchmarkConfig benchmark_config_from_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const std::filesystem::path& base_dir);

/// Parameters chosen for one (runner, dataset, metric).
struct Selection {
  std::string algorithm;
  std::string dataset;
  Metric metric = Metric::kF1;
  std::optional<Params> params;  // absent when the study had no complete trial
  std::size_t trials = 0;
  std::size_t failed_trials = 0;
};

struct BenchmarkResult {
  ResultsCube cube;
  std::vector<Selection> selections;
  std::vector<ConformanceReport> conformance;
  std::vector<std::string> warnings;
};

/// Optimizes on the first seed, evaluates every seed under the selected
/// params and assembles a complete cube. Runner and dataset failures become
/// FAILED cells. Throws kConfig for an invalid configuration.
BenchmarkResult run_benchmark(const BenchmarkConfig& cfg, std::ostream* log = nullptr);

/// Throws kAlignment when the cubes do not share their axes.
RegimeComparison compare_regimes(const ResultsCube& default_cube, const ResultsCube& hpo_cube);

/// Runs both benchmarks, then compares them. The configs must differ only in mode.
RegimeComparison compare_regimes(const BenchmarkConfig& cfg_default, const BenchmarkConfig& cfg_hpo,
                                 std::ostream* log = nullptr);

}  // namespace commbench
