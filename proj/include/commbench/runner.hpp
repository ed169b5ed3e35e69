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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "commbench/graph.hpp"
#include "commbench/protocol.hpp"
#include "commbench/search_space.hpp"

namespace commbench {

enum class RunnerKind { kExternal, kBuiltin };

enum class Builtin { kKMeans, kLabelPropagation, kGreedyModularity, kRandomPartition };

std::string_view to_string(Builtin b);
std::optional<Builtin> parse_builtin(std::string_view name);

struct RunnerSpec {
  std::string name;
  RunnerKind kind = RunnerKind::kBuiltin;
  Builtin builtin = Builtin::kRandomPartition;  // kBuiltin only
  std::vector<std::string> launch;              // kExternal only: argv
  SearchSpace search_space;
  std::optional<Params> defaults;
  int protocol_version = kProtocolVersion;
  /// Whether the harness adds the learning-rate and weight-decay dimensions
  /// of the resource configuration to this runner's studies.
  bool optimizer_params = false;
};

/// Parses a runner spec file (JSON; see docs/protocol.md). Relative launch
/// paths stay relative to the caller's working directory. Throws kConfig.
RunnerSpec load_runner_spec(const std::filesystem::path& path);
RunnerSpec runner_spec_from_json(const nlohmann::json& j);

/// The four desk-scale baselines with their search spaces and defaults.
std::vector<RunnerSpec> builtin_baselines();
RunnerSpec builtin_spec(Builtin b);

struct RunLimits {
  double timeout_seconds = 600.0;
  std::uint64_t memory_bytes = 0;  // 0: no limit
};

/// Trains once and returns a validated response: an ok response always holds
/// a partition of length N with values in [0, k). Never throws for runner
/// misbehaviour; that is reported through the status.
TrainResponse train_and_predict(const RunnerSpec& spec, const TrainRequest& req, const Graph& g,
                                const RunLimits& limits = {});

/// Builtins run in-process on an already loaded graph.
TrainResponse run_builtin(Builtin b, const TrainRequest& req, const Graph& g);

/// What came back from one external exchange before any interpretation.
struct Exchange {
  bool launched = false;
  bool handshake_ok = false;
  bool timed_out = false;
  std::optional<nlohmann::json> result;
  std::optional<int> exit_code;    // set on normal exit
  std::optional<int> term_signal;  // set when killed by a signal
  bool killed_by_harness = false;
  std::string diagnostic;          // protocol problems and captured stderr tail
};

/// Runs hello/train against a fresh process. `req` absent: handshake only.
Exchange exchange(const RunnerSpec& spec, const std::optional<TrainRequest>& req,
                  const RunLimits& limits);

struct ConformancePhase {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ConformanceReport {
  std::string runner;
  std::vector<ConformancePhase> phases;  // phases after the first failure are not run

  bool passed() const;
  /// Name of the first failing phase, empty when all passed.
  std::string failed_phase() const;
};

/// Phases in order: handshake, round-trip, response-validation, determinism,
/// failure-injection.
ConformanceReport validate_runner(const RunnerSpec& spec, const RunLimits& limits = {});

}  // namespace commbench
