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

#include "commbench/runner.hpp"

#include <signal.h>

#include <chrono>
#include <fstream>

#include "commbench/error.hpp"
#include "commbench/text.hpp"
#include "subprocess.hpp"

namespace commbench {
namespace {

using nlohmann::json;
using detail::Clock;

constexpr std::string_view kHarnessName = "commbench";
constexpr auto kExitGrace = std::chrono::seconds(10);

constexpr Builtin kAllBuiltins[] = {Builtin::kKMeans, Builtin::kLabelPropagation,
                                    Builtin::kGreedyModularity, Builtin::kRandomPartition};

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::kConfig, what); }

/// Why an ok partition cannot be used, or empty when it can.
std::string partition_problem(const std::vector<std::int32_t>& p, std::size_t n, std::int64_t k) {
  if (p.size() != n) {
    return "partition has " + std::to_string(p.size()) + " entries for " + std::to_string(n) +
           " nodes";
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0 || p[i] >= k) {
      return "partition entry " + std::to_string(i) + " = " + std::to_string(p[i]) +
             " outside [0, " + std::to_string(k) + ")";
    }
  }
  return {};
}

bool mentions_oom(const std::string& text) {
  return text.find("std::bad_alloc") != std::string::npos ||
         text.find("MemoryError") != std::string::npos ||
         text.find("out of memory") != std::string::npos;
}

std::string describe_exit(const Exchange& ex) {
  if (ex.term_signal) return "runner killed by signal " + std::to_string(*ex.term_signal);
  if (ex.exit_code == 127) return "runner could not be launched (exit 127)";
  if (ex.exit_code) return "runner exited with code " + std::to_string(*ex.exit_code);
  return "runner exit status unknown";
}

TrainResponse interpret(const Exchange& ex, const Graph& g, std::int64_t k, double elapsed) {
  TrainResponse resp;
  resp.wall_time = elapsed;
  auto fail = [&](RunStatus s, std::string why) {
    resp.status = s;
    resp.partition.clear();
    resp.error = std::move(why);
    if (!ex.diagnostic.empty()) resp.error += "; " + ex.diagnostic;
    return resp;
  };
  if (ex.timed_out) return fail(RunStatus::kTimeout, "runner exceeded the wall-clock limit");
  if (!ex.launched) return fail(RunStatus::kCrash, "runner could not be launched");
  if (!ex.result) {
    // A SIGKILL nobody here sent is most likely the kernel's OOM killer.
    const bool killed = ex.term_signal && *ex.term_signal == SIGKILL && !ex.killed_by_harness;
    if (killed || mentions_oom(ex.diagnostic)) return fail(RunStatus::kOom, describe_exit(ex));
    return fail(RunStatus::kCrash, describe_exit(ex) + " without a result");
  }
  TrainResponse parsed;
  try {
    parsed = protocol::train_response_from_json(*ex.result);
  } catch (const Error& e) {
    return fail(RunStatus::kCrash, std::string("malformed response: ") + e.what());
  }
  if (parsed.status != RunStatus::kOk) return fail(parsed.status, parsed.error);
  if (ex.exit_code != 0) return fail(RunStatus::kCrash, describe_exit(ex));
  if (auto why = partition_problem(parsed.partition, g.node_count(), k); !why.empty()) {
    return fail(RunStatus::kCrash, "invalid response: " + why);
  }
  parsed.error.clear();
  return parsed;
}

}  // namespace

std::string_view to_string(Builtin b) {
  switch (b) {
    case Builtin::kKMeans: return "kmeans";
    case Builtin::kLabelPropagation: return "label-propagation";
    case Builtin::kGreedyModularity: return "greedy-modularity";
    case Builtin::kRandomPartition: return "random-partition";
  }
  return "?";
}

std::optional<Builtin> parse_builtin(std::string_view name) {
  for (Builtin b : kAllBuiltins) {
    if (to_string(b) == name) return b;
  }
  return std::nullopt;
}

RunnerSpec builtin_spec(Builtin b) {
  RunnerSpec s;
  s.name = std::string(to_string(b));
  s.kind = RunnerKind::kBuiltin;
  s.builtin = b;
  switch (b) {
    case Builtin::kKMeans:
      s.search_space = {Dimension::int_uniform("restarts", 1, 10),
                        Dimension::int_uniform("max_iter", 10, 300)};
      s.defaults = Params{{"restarts", std::int64_t{10}}, {"max_iter", std::int64_t{300}}};
      break;
    case Builtin::kLabelPropagation:
      s.search_space = {Dimension::int_uniform("max_rounds", 1, 100)};
      s.defaults = Params{{"max_rounds", std::int64_t{100}}};
      break;
    case Builtin::kGreedyModularity:
    case Builtin::kRandomPartition:
      s.defaults = Params{};
      break;
  }
  return s;
}

std::vector<RunnerSpec> builtin_baselines() {
  std::vector<RunnerSpec> out;
  for (Builtin b : kAllBuiltins) out.push_back(builtin_spec(b));
  return out;
}

RunnerSpec runner_spec_from_json(const json& j) {
  if (!j.is_object()) config_error("runner spec must be a JSON object");
  auto str = [&](const char* key) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end()) return std::nullopt;
    if (!it->is_string()) config_error(std::string("runner spec field '") + key + "' must be a string");
    return it->get<std::string>();
  };
  const auto kind = str("kind");
  if (!kind) config_error("runner spec needs 'kind' (external or builtin)");

  RunnerSpec s;
  if (*kind == "builtin") {
    const auto which = str("builtin");
    const auto b = which ? parse_builtin(*which) : std::nullopt;
    if (!b) config_error("builtin runner spec needs 'builtin': one of kmeans, label-propagation, "
                         "greedy-modularity, random-partition");
    s = builtin_spec(*b);
  } else if (*kind == "external") {
    s.kind = RunnerKind::kExternal;
    auto it = j.find("launch");
    if (it == j.end() || !it->is_array() || it->empty()) {
      config_error("external runner spec needs a non-empty 'launch' array");
    }
    for (const auto& a : *it) {
      if (!a.is_string()) config_error("'launch' entries must be strings");
      s.launch.push_back(a.get<std::string>());
    }
  } else {
    config_error("unknown runner kind '" + *kind + "'");
  }

  if (auto name = str("name")) s.name = *name;
  if (s.name.empty()) config_error("runner spec needs a 'name'");
  if (auto it = j.find("protocol_version"); it != j.end()) {
    if (!it->is_number_integer()) config_error("'protocol_version' must be an integer");
    s.protocol_version = it->get<int>();
  }
  if (auto it = j.find("search_space"); it != j.end()) s.search_space = SearchSpace::from_json(*it);
  if (auto it = j.find("defaults"); it != j.end()) {
    if (!it->is_object()) config_error("'defaults' must be an object");
    s.defaults = params_from_json(*it);
  }
  if (auto it = j.find("optimizer_params"); it != j.end()) {
    if (!it->is_boolean()) config_error("'optimizer_params' must be true or false");
    s.optimizer_params = it->get<bool>();
  }
  return s;
}

RunnerSpec load_runner_spec(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::kParse, path.string() + ": not valid JSON");
  try {
    return runner_spec_from_json(j);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

Exchange exchange(const RunnerSpec& spec, const std::optional<TrainRequest>& req,
                  const RunLimits& limits) {
  Exchange ex;
  const auto deadline =
      Clock::now() + std::chrono::duration_cast<Clock::duration>(
                         std::chrono::duration<double>(limits.timeout_seconds));
  std::optional<detail::ChildProcess> child;
  try {
    child.emplace(spec.launch, limits.memory_bytes);
  } catch (const Error& e) {
    ex.diagnostic = e.what();
    return ex;
  }
  ex.launched = true;

  auto note = [&](const std::string& s) {
    if (!ex.diagnostic.empty()) ex.diagnostic += "; ";
    ex.diagnostic += s;
  };
  detail::ExitStatus status;
  try {
    if (!child->send(protocol::frame(protocol::hello(kHarnessName)), deadline)) {
      note("runner closed its input before the handshake");
    } else if (auto ack = child->receive(deadline); !ack) {
      note("no hello_ack before end of stream");
    } else if (ack->value("type", "") != "hello_ack") {
      note("expected hello_ack, got '" + ack->value("type", "") + "'");
    } else if (!(*ack)["protocol"].is_number_integer() ||
               (*ack)["protocol"].get<int>() != kProtocolVersion ||
               spec.protocol_version != kProtocolVersion) {
      note("protocol version mismatch (harness speaks " + std::to_string(kProtocolVersion) + ")");
    } else {
      ex.handshake_ok = true;
      if (req) {
        if (!child->send(protocol::frame(protocol::to_json(*req)), deadline)) {
          note("runner closed its input before the train request");
        } else {
          ex.result = child->receive(deadline);
        }
      }
    }
    child->close_stdin();
    status = child->wait(std::min(deadline, Clock::now() + kExitGrace));
    if (Clock::now() >= deadline && !status.code) ex.timed_out = !ex.result.has_value();
  } catch (const detail::DeadlineExceeded&) {
    ex.timed_out = true;
    child->kill_group();
    status = child->wait(Clock::now());
  } catch (const Error& e) {
    note(std::string("protocol violation: ") + e.what());
    child->kill_group();
    status = child->wait(Clock::now());
  }
  ex.exit_code = status.code;
  ex.term_signal = status.signal;
  ex.killed_by_harness = status.killed;
  if (!child->stderr_tail().empty()) note("stderr: " + std::string(trim(child->stderr_tail())));
  return ex;
}

TrainResponse train_and_predict(const RunnerSpec& spec, const TrainRequest& req, const Graph& g,
                                const RunLimits& limits) {
  if (spec.kind == RunnerKind::kBuiltin) {
    TrainResponse resp = run_builtin(spec.builtin, req, g);
    if (resp.status == RunStatus::kOk) {
      if (auto why = partition_problem(resp.partition, g.node_count(), req.k); !why.empty()) {
        resp.status = RunStatus::kCrash;
        resp.partition.clear();
        resp.error = "invalid response: " + why;
      }
    }
    return resp;
  }
  const auto start = Clock::now();
  const Exchange ex = exchange(spec, req, limits);
  return interpret(ex, g, req.k,
                   std::chrono::duration<double>(Clock::now() - start).count());
}

bool ConformanceReport::passed() const {
  if (phases.empty()) return false;
  for (const auto& p : phases) {
    if (!p.passed) return false;
  }
  return true;
}

std::string ConformanceReport::failed_phase() const {
  for (const auto& p : phases) {
    if (!p.passed) return p.name;
  }
  return {};
}

ConformanceReport validate_runner(const RunnerSpec& spec, const RunLimits& limits) {
  ConformanceReport report;
  report.runner = spec.name;
  auto phase = [&](std::string name, bool ok, std::string detail) {
    report.phases.push_back({std::move(name), ok, std::move(detail)});
    return ok;
  };

  // A small separable instance written to disk so external runners can load it.
  PlantedPartitionConfig cfg;
  cfg.name = "conformance";
  cfg.nodes = 24;
  cfg.blocks = 2;
  cfg.p_in = 0.5;
  cfg.p_out = 0.05;
  cfg.feature_dim = 4;
  const Graph g = make_planted_partition(cfg, 1);
  const TempDir dir("commbench-conformance");
  save_dataset(g, dir.path(), FeatureEncoding::kText);
  const NodeSplits splits = split_nodes(g, 0.8, 0.8, 42);

  TrainRequest req;
  req.dataset_path = dir.path().string();
  req.params = spec.defaults.value_or(Params{});
  req.seed = 42;
  req.max_epochs = 50;
  req.patience = 10;
  req.k = 2;
  req.train_nodes = splits.train;
  req.val_nodes = splits.validation;

  const bool builtin = spec.kind == RunnerKind::kBuiltin;
  // Raw response of one training request, before partition validation.
  auto raw_train = [&](const TrainRequest& r, std::string& why) -> std::optional<TrainResponse> {
    if (builtin) return run_builtin(spec.builtin, r, g);
    const Exchange ex = exchange(spec, r, limits);
    if (ex.timed_out) {
      why = "timed out";
      return std::nullopt;
    }
    if (!ex.result) {
      why = describe_exit(ex) + " without a result" +
            (ex.diagnostic.empty() ? "" : "; " + ex.diagnostic);
      return std::nullopt;
    }
    try {
      TrainResponse resp = protocol::train_response_from_json(*ex.result);
      if (resp.status == RunStatus::kOk && ex.exit_code != 0) {
        why = describe_exit(ex) + " after an ok result";
        return std::nullopt;
      }
      return resp;
    } catch (const Error& e) {
      why = std::string("malformed result: ") + e.what();
      return std::nullopt;
    }
  };

  if (builtin) {
    phase("handshake", true, "builtin runner, in-process");
  } else {
    const Exchange ex = exchange(spec, std::nullopt, limits);
    const bool ok = ex.handshake_ok && ex.exit_code == 0;
    std::string detail = ok ? "hello_ack received, clean exit" : ex.diagnostic;
    if (!ok && ex.handshake_ok) detail = describe_exit(ex) + " after the handshake";
    if (!ok && detail.empty()) detail = describe_exit(ex);
    if (!phase("handshake", ok, detail)) return report;
  }

  std::string why;
  const auto first = raw_train(req, why);
  if (!first) {
    phase("round-trip", false, why);
    return report;
  }
  if (!phase("round-trip", first->status == RunStatus::kOk,
             first->status == RunStatus::kOk
                 ? "ok result in " + format_fixed(first->wall_time, 3) + " s"
                 : "status " + std::string(to_string(first->status)) + ": " + first->error)) {
    return report;
  }
  {
    const std::string problem = partition_problem(first->partition, g.node_count(), req.k);
    if (!phase("response-validation", problem.empty(),
               problem.empty() ? "partition of length " + std::to_string(g.node_count()) +
                                     " with values in [0, 2)"
                               : problem)) {
      return report;
    }
  }
  const auto second = raw_train(req, why);
  if (!second) {
    phase("determinism", false, "second run: " + why);
    return report;
  }
  if (!phase("determinism", second->partition == first->partition,
             second->partition == first->partition
                 ? "identical partitions for seed 42"
                 : "partitions differ between two runs with seed 42")) {
    return report;
  }

  TrainRequest bad = req;
  bad.k = 0;
  const auto injected = raw_train(bad, why);
  if (!injected) {
    phase("failure-injection", false, "request with k = 0: " + why);
  } else {
    const bool ok = injected->status != RunStatus::kOk;
    phase("failure-injection", ok,
          ok ? "k = 0 answered with status " + std::string(to_string(injected->status))
             : "k = 0 answered with status ok");
  }
  return report;
}

}  // namespace commbench
