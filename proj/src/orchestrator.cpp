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

#include "commbench/orchestrator.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "commbench/error.hpp"
#include "commbench/hpo.hpp"
#include "commbench/random.hpp"
#include "commbench/text.hpp"

namespace commbench {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::kConfig, what); }

const std::set<std::string> kRepeatableKeys = {"dataset", "runner"};

template <typename T>
T parse_scalar(const std::string& key, std::string_view text) {
  const auto v = parse_number<T>(text);
  if (!v) config_error("config key '" + key + "': cannot parse '" + std::string(text) + "'");
  return *v;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, std::string_view text) {
  std::vector<T> out;
  for (auto field : split_on(text, ',')) {
    field = trim(field);
    if (field.empty()) continue;
    out.push_back(parse_scalar<T>(key, field));
  }
  if (out.empty()) config_error("config key '" + key + "' needs at least one value");
  return out;
}

bool parse_bool(const std::string& key, std::string_view text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  config_error("config key '" + key + "' must be true or false");
}

RunnerSpec parse_runner(std::string_view text, const std::filesystem::path& base) {
  constexpr std::string_view prefix = "builtin:";
  if (text.substr(0, prefix.size()) == prefix) {
    const auto b = parse_builtin(text.substr(prefix.size()));
    if (!b) config_error("unknown builtin runner '" + std::string(text) + "'");
    return builtin_spec(*b);
  }
  std::filesystem::path p(text);
  if (p.is_relative()) p = base / p;
  return load_runner_spec(p);
}

DatasetSource parse_dataset(std::string_view text, const std::filesystem::path& base) {
  if (text.substr(0, 8) == "planted:") return parse_planted_source(text);
  DatasetSource d;
  d.path = std::filesystem::path(text);
  if (d.path.is_relative()) d.path = base / d.path;
  d.path = d.path.lexically_normal();
  d.name = d.path.has_filename() ? d.path.filename().string() : d.path.parent_path().filename().string();
  if (d.name.empty()) config_error("cannot derive a dataset name from '" + std::string(text) + "'");
  return d;
}

void validate(const BenchmarkConfig& cfg) {
  if (cfg.datasets.empty()) config_error("config lists no dataset");
  if (cfg.runners.empty()) config_error("config lists no runner");
  if (cfg.metrics.empty()) config_error("config lists no metric");
  const auto& r = cfg.resources;
  if (r.seeds.empty()) config_error("config lists no seed");
  if (std::set<std::int64_t>(r.seeds.begin(), r.seeds.end()).size() != r.seeds.size()) {
    config_error("seeds must be distinct");
  }
  if (r.patience.empty() || *std::min_element(r.patience.begin(), r.patience.end()) < 1) {
    config_error("patience domain must hold positive integers");
  }
  if (r.max_epochs < 1) config_error("max_epochs must be at least 1");
  if (!(r.train_fraction > 0.0 && r.train_fraction < 1.0) ||
      !(r.val_fraction_of_train > 0.0 && r.val_fraction_of_train < 1.0)) {
    config_error("split fractions must lie in (0, 1)");
  }
  if (!(r.timeout_seconds > 0.0)) config_error("timeout must be positive");
  if (cfg.mode == Mode::kHpo && r.max_trials < 1) config_error("max_trials must be at least 1");
  std::set<std::string> names;
  for (const auto& spec : cfg.runners) {
    if (!names.insert(spec.name).second) config_error("duplicate runner name '" + spec.name + "'");
    if (cfg.mode == Mode::kDefault && !spec.defaults) {
      config_error("default mode needs published defaults for runner '" + spec.name + "'");
    }
  }
  names.clear();
  for (const auto& d : cfg.datasets) {
    if (!names.insert(d.name).second) config_error("duplicate dataset name '" + d.name + "'");
  }
  if (std::set<Metric>(cfg.metrics.begin(), cfg.metrics.end()).size() != cfg.metrics.size()) {
    config_error("metrics must be distinct");
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::kIo, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

class Log {
 public:
  explicit Log(std::ostream* out) : out_(out) {}
  void line(const std::string& s) {
    if (!out_) return;
    std::lock_guard lock(mu_);
    *out_ << s << '\n' << std::flush;
  }

 private:
  std::ostream* out_;
  std::mutex mu_;
};

/// Runs fn(0..n-1) on up to `workers` threads. fn must not throw.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

FailureReason to_failure(RunStatus s) {
  switch (s) {
    case RunStatus::kOom: return FailureReason::kOom;
    case RunStatus::kTimeout: return FailureReason::kTimeout;
    default: return FailureReason::kCrash;
  }
}

struct LoadedDataset {
  std::string name;
  std::optional<Graph> graph;
  std::string path;  // what external runners are given
  std::vector<Metric> metrics;
  std::vector<std::size_t> test_index;  // cube test of each metric
  std::vector<std::optional<NodeSplits>> splits;  // per seed
};

SearchSpace study_space(const RunnerSpec& spec, const ResourceConfig& r) {
  SearchSpace s = spec.search_space;
  auto add_if_absent = [&](const std::string& name, std::vector<ParamValue> choices) {
    if (!s.find(name)) s.add(Dimension::categorical(name, std::move(choices)));
  };
  std::vector<ParamValue> patience(r.patience.begin(), r.patience.end());
  add_if_absent("patience", patience);
  if (spec.optimizer_params) {
    add_if_absent("learning_rate", {r.learning_rates.begin(), r.learning_rates.end()});
    add_if_absent("weight_decay", {r.weight_decays.begin(), r.weight_decays.end()});
  }
  return s;
}

TrainRequest make_request(const RunnerSpec& spec, const ResourceConfig& r, const LoadedDataset& d,
                          const Params& params, std::size_t seed_index) {
  TrainRequest req;
  req.dataset_path = d.path;
  req.params = params;
  req.seed = r.seeds[seed_index];
  req.max_epochs = r.max_epochs;
  req.k = static_cast<std::int64_t>(d.graph->k());
  req.patience = *std::max_element(r.patience.begin(), r.patience.end());
  if (auto it = req.params.find("patience"); it != req.params.end()) {
    if (auto v = as_number(it->second)) req.patience = static_cast<std::int64_t>(*v);
    req.params.erase(it);
  }
  if (spec.optimizer_params && !req.params.count("optimizer")) req.params["optimizer"] = r.optimizer;
  const NodeSplits& s = *d.splits[seed_index];
  req.train_nodes = s.train;
  req.val_nodes = s.validation;
  return req;
}

/// Validation objectives, all maximized; conductance enters negated.
std::vector<double> validation_objectives(const LoadedDataset& d, const std::vector<Metric>& metrics,
                                          const TrainResponse& resp) {
  const Graph& g = *d.graph;
  const Partition p(resp.partition, g.k());
  const auto& val = d.splits.front()->validation;
  std::optional<std::span<const std::int32_t>> labels;
  if (g.has_labels()) labels = std::span<const std::int32_t>(*g.labels());
  const auto values = evaluate_all(g, p, labels, val, metrics);
  std::vector<double> out;
  for (Metric m : metrics) {
    const MetricResult& r = values.at(m);
    if (!r.value) throw *r.error;
    out.push_back(m == Metric::kConductance ? -r.value->value : r.value->value);
  }
  return out;
}

std::string job_label(const RunnerSpec& spec, const LoadedDataset& d) {
  return spec.name + " on " + d.name;
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::kHpo ? "hpo" : "default"; }
std::string_view to_string(StudyScope s) { return s == StudyScope::kJoint ? "joint" : "per-test"; }

DatasetSource parse_planted_source(std::string_view text) {
  constexpr std::string_view prefix = "planted:";
  if (text.substr(0, prefix.size()) != prefix) config_error("planted source must start with 'planted:'");
  const auto fields = split_fields(text.substr(prefix.size()));
  if (fields.empty() || fields[0].find('=') != std::string_view::npos) {
    config_error("planted source needs a name: planted:<name> key=value ...");
  }
  DatasetSource d;
  d.name = std::string(fields[0]);
  PlantedPartitionConfig cfg;
  cfg.name = d.name;
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const auto kv = split_on(fields[i], '=');
    if (kv.size() != 2) config_error("planted source field '" + std::string(fields[i]) + "' is not key=value");
    const std::string key(kv[0]);
    if (key == "nodes") cfg.nodes = parse_scalar<std::size_t>(key, kv[1]);
    else if (key == "blocks") cfg.blocks = parse_scalar<std::size_t>(key, kv[1]);
    else if (key == "p_in") cfg.p_in = parse_scalar<double>(key, kv[1]);
    else if (key == "p_out") cfg.p_out = parse_scalar<double>(key, kv[1]);
    else if (key == "feature_dim") cfg.feature_dim = parse_scalar<std::size_t>(key, kv[1]);
    else if (key == "separation") cfg.feature_separation = parse_scalar<double>(key, kv[1]);
    else if (key == "seed") d.planted_seed = parse_scalar<std::uint64_t>(key, kv[1]);
    else config_error("unknown planted source key '" + key + "'");
  }
  d.planted = cfg;
  return d;
}

std::string BenchmarkConfig::canonical_text() const {
  json j;
  j["mode"] = to_string(mode);
  j["study"] = to_string(study_scope);
  j["trials_in_flight"] = trials_in_flight;
  j["skip_conformance"] = skip_conformance;
  json ds = json::array();
  for (const auto& d : datasets) {
    json e = {{"name", d.name}};
    if (d.planted) {
      const auto& p = *d.planted;
      e["planted"] = {{"nodes", p.nodes}, {"blocks", p.blocks}, {"p_in", format_double(p.p_in)},
                      {"p_out", format_double(p.p_out)}, {"feature_dim", p.feature_dim},
                      {"separation", format_double(p.feature_separation)}, {"seed", d.planted_seed}};
    } else {
      e["path"] = d.path.string();
    }
    ds.push_back(e);
  }
  j["datasets"] = ds;
  json rs = json::array();
  for (const auto& r : runners) {
    json e = {{"name", r.name},
              {"search_space", r.search_space.to_json()},
              {"optimizer_params", r.optimizer_params},
              {"protocol_version", r.protocol_version}};
    if (r.kind == RunnerKind::kBuiltin) {
      e["builtin"] = to_string(r.builtin);
    } else {
      e["launch"] = r.launch;
    }
    e["defaults"] = r.defaults ? to_json(*r.defaults) : json(nullptr);
    rs.push_back(e);
  }
  j["runners"] = rs;
  json ms = json::array();
  for (Metric m : metrics) ms.push_back(to_string(m));
  j["metrics"] = ms;
  const auto& r = resources;
  auto reals = [](const std::vector<double>& xs) {
    json a = json::array();
    for (double x : xs) a.push_back(format_double(x));
    return a;
  };
  j["resources"] = {{"learning_rate", reals(r.learning_rates)},
                    {"weight_decay", reals(r.weight_decays)},
                    {"max_epochs", r.max_epochs},
                    {"patience", r.patience},
                    {"max_trials", r.max_trials},
                    {"seeds", r.seeds},
                    {"train_fraction", format_double(r.train_fraction)},
                    {"val_fraction", format_double(r.val_fraction_of_train)},
                    {"timeout", format_double(r.timeout_seconds)},
                    {"memory_limit_bytes", r.memory_bytes},
                    {"optimizer", r.optimizer}};
  return j.dump();
}

std::string BenchmarkConfig::fingerprint() const { return sha256_hex(canonical_text()); }

BenchmarkConfig benchmark_config_from_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const std::filesystem::path& base_dir) {
  BenchmarkConfig cfg;
  cfg.datasets.clear();
  cfg.runners.clear();
  ResourceConfig& r = cfg.resources;
  for (const auto& [key, value] : pairs) {
    if (key == "mode") {
      if (value == "hpo") cfg.mode = Mode::kHpo;
      else if (value == "default") cfg.mode = Mode::kDefault;
      else config_error("mode must be hpo or default");
    } else if (key == "study") {
      if (value == "joint") cfg.study_scope = StudyScope::kJoint;
      else if (value == "per-test") cfg.study_scope = StudyScope::kPerTest;
      else config_error("study must be joint or per-test");
    } else if (key == "dataset") {
      cfg.datasets.push_back(parse_dataset(value, base_dir));
    } else if (key == "runner") {
      cfg.runners.push_back(parse_runner(value, base_dir));
    } else if (key == "metrics") {
      cfg.metrics.clear();
      for (auto f : split_on(value, ',')) {
        f = trim(f);
        const auto m = parse_metric(f);
        if (!m) throw Error(ErrorKind::kUnsupportedMetric, "unknown metric '" + std::string(f) + "'");
        cfg.metrics.push_back(*m);
      }
    } else if (key == "seeds") {
      r.seeds = parse_list<std::int64_t>(key, value);
    } else if (key == "learning_rate") {
      r.learning_rates = parse_list<double>(key, value);
    } else if (key == "weight_decay") {
      r.weight_decays = parse_list<double>(key, value);
    } else if (key == "patience") {
      r.patience = parse_list<std::int64_t>(key, value);
    } else if (key == "max_epochs") {
      r.max_epochs = parse_scalar<std::int64_t>(key, value);
    } else if (key == "max_trials") {
      r.max_trials = parse_scalar<std::size_t>(key, value);
    } else if (key == "train_fraction") {
      r.train_fraction = parse_scalar<double>(key, value);
    } else if (key == "val_fraction") {
      r.val_fraction_of_train = parse_scalar<double>(key, value);
    } else if (key == "timeout") {
      r.timeout_seconds = parse_scalar<double>(key, value);
    } else if (key == "memory_limit_mb") {
      r.memory_bytes = parse_scalar<std::uint64_t>(key, value) * 1024 * 1024;
    } else if (key == "optimizer") {
      r.optimizer = value;
    } else if (key == "workers") {
      cfg.workers = parse_scalar<std::size_t>(key, value);
    } else if (key == "trials_in_flight") {
      cfg.trials_in_flight = parse_scalar<std::size_t>(key, value);
    } else if (key == "skip_conformance") {
      cfg.skip_conformance = parse_bool(key, value);
    } else if (key == "history_dir") {
      std::filesystem::path p(value);
      cfg.history_dir = p.is_relative() ? base_dir / p : p;
    } else {
      config_error("unknown config key '" + key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

BenchmarkConfig load_benchmark_config(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::vector<std::pair<std::string, std::string>> pairs;
  try {
    pairs = read_key_value_list(path);
  } catch (const Error& e) {
    throw Error(e.kind() == ErrorKind::kParse ? ErrorKind::kConfig : e.kind(), e.what());
  }
  std::set<std::string> replaced;
  for (const auto& [key, value] : overrides) {
    if (kRepeatableKeys.count(key) && replaced.insert(key).second) {
      std::erase_if(pairs, [&](const auto& kv) { return kv.first == key; });
    }
    pairs.emplace_back(key, value);
  }
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return benchmark_config_from_pairs(pairs, base);
}

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg, std::ostream* log_stream) {
  validate(cfg);
  Log log(log_stream);
  BenchmarkResult out;
  std::mutex warn_mu;
  auto warn = [&](const std::string& w) {
    log.line("warning: " + w);
    std::lock_guard lock(warn_mu);
    out.warnings.push_back(w);
  };
  const ResourceConfig& res = cfg.resources;
  const RunLimits limits{res.timeout_seconds, res.memory_bytes};
  const bool any_external = std::any_of(cfg.runners.begin(), cfg.runners.end(),
                                        [](const auto& r) { return r.kind == RunnerKind::kExternal; });

  // Datasets and the test axis.
  std::optional<TempDir> scratch;
  std::vector<LoadedDataset> data;
  std::vector<TestPoint> tests;
  for (const auto& src : cfg.datasets) {
    LoadedDataset d;
    d.name = src.name;
    try {
      if (src.planted) {
        d.graph = make_planted_partition(*src.planted, src.planted_seed);
        if (any_external) {
          if (!scratch) scratch.emplace("commbench-run");
          const auto dir = scratch->path() / d.name;
          save_dataset(*d.graph, dir, FeatureEncoding::kBinary);
          d.path = dir.string();
        }
      } else {
        d.graph = load_dataset(src.path);
        d.path = src.path.string();
      }
      if (d.graph->k() == 0) throw Error(ErrorKind::kValidation, "number of communities is unknown");
      d.splits.resize(res.seeds.size());
      for (std::size_t s = 0; s < res.seeds.size(); ++s) {
        d.splits[s] = split_nodes(*d.graph, res.train_fraction, res.val_fraction_of_train, res.seeds[s]);
      }
    } catch (const Error& e) {
      warn("dataset " + d.name + " unusable, its cells are FAILED: " + e.what());
      d.graph.reset();
    }
    for (Metric m : cfg.metrics) {
      if (d.graph && is_supervised(m) && !d.graph->has_labels()) {
        warn("dataset " + d.name + " has no labels; " + std::string(to_string(m)) + " skipped");
        continue;
      }
      d.metrics.push_back(m);
      d.test_index.push_back(tests.size());
      tests.push_back({d.name, m});
    }
    data.push_back(std::move(d));
  }

  std::vector<std::string> names;
  for (const auto& r : cfg.runners) names.push_back(r.name);
  out.cube = ResultsCube(names, res.seeds, tests);

  // Conformance gate for external runners.
  std::vector<bool> usable(cfg.runners.size(), true);
  for (std::size_t a = 0; a < cfg.runners.size(); ++a) {
    const RunnerSpec& spec = cfg.runners[a];
    if (spec.kind != RunnerKind::kExternal || cfg.skip_conformance) continue;
    ConformanceReport rep = validate_runner(spec, limits);
    if (!rep.passed()) {
      usable[a] = false;
      const auto& failed = rep.phases.back();
      warn("runner " + spec.name + " failed conformance at " + failed.name + " (" + failed.detail +
           "); its cells are FAILED(crash)");
    }
    out.conformance.push_back(std::move(rep));
  }

  // Phase 1: parameter selection per (runner, dataset).
  const std::size_t jobs = cfg.runners.size() * data.size();
  std::vector<std::vector<std::optional<Params>>> chosen(jobs);        // per metric of the dataset
  std::vector<std::vector<FailureReason>> no_choice_reason(jobs);
  std::vector<std::vector<Selection>> selections(jobs);

  parallel_for(jobs, cfg.workers, [&](std::size_t job) {
    const std::size_t a = job / data.size();
    const LoadedDataset& d = data[job % data.size()];
    const RunnerSpec& spec = cfg.runners[a];
    chosen[job].assign(d.metrics.size(), std::nullopt);
    no_choice_reason[job].assign(d.metrics.size(), FailureReason::kCrash);
    if (!usable[a] || !d.graph) return;

    if (cfg.mode == Mode::kDefault) {
      for (std::size_t i = 0; i < d.metrics.size(); ++i) {
        chosen[job][i] = *spec.defaults;
        selections[job].push_back({spec.name, d.name, d.metrics[i], *spec.defaults, 0, 0});
      }
      return;
    }

    const SearchSpace space = study_space(spec, res);
    // Joint: one study over all metrics. Per-test: one study per metric.
    std::vector<std::vector<std::size_t>> groups;
    if (cfg.study_scope == StudyScope::kJoint) {
      groups.emplace_back(d.metrics.size());
      std::iota(groups.back().begin(), groups.back().end(), 0);
    } else {
      for (std::size_t i = 0; i < d.metrics.size(); ++i) groups.push_back({i});
    }
    for (const auto& group : groups) {
      std::vector<Metric> objectives;
      for (std::size_t i : group) objectives.push_back(d.metrics[i]);
      std::string tag = spec.name + "/" + d.name;
      if (cfg.study_scope == StudyScope::kPerTest) tag += "/" + std::string(to_string(objectives[0]));
      std::mutex fail_mu;
      std::map<std::size_t, FailureReason> failures;
      auto objective = [&](const Params& p, const Trial& t) -> TrialOutcome {
        const TrainRequest req = make_request(spec, res, d, p, 0);
        const TrainResponse resp = train_and_predict(spec, req, *d.graph, limits);
        if (resp.status != RunStatus::kOk) {
          std::lock_guard lock(fail_mu);
          failures[t.index] = to_failure(resp.status);
          return {{}, true};
        }
        return {validation_objectives(d, objectives, resp), false};
      };
      const StudyState st = run_study(objective, space, {res.max_trials, cfg.trials_in_flight},
                                      mix_seed(static_cast<std::uint64_t>(res.seeds[0]), tag));
      std::size_t failed = 0;
      for (const auto& t : st.history) failed += t.status == TrialStatus::kFailed;
      log.line("[hpo] " + job_label(spec, d) +
               (cfg.study_scope == StudyScope::kPerTest ? " (" + std::string(to_string(objectives[0])) + ")" : "") +
               ": " + std::to_string(st.history.size()) + " trials, " + std::to_string(failed) + " failed");
      if (!cfg.history_dir.empty()) {
        std::ostringstream hist;
        export_history(st, hist);
        std::string file = tag;
        std::replace(file.begin(), file.end(), '/', '_');
        std::error_code ec;
        std::filesystem::create_directories(cfg.history_dir, ec);
        try {
          write_file_atomic(cfg.history_dir / (file + ".jsonl"), hist.str());
        } catch (const Error& e) {
          warn(std::string("could not write study history: ") + e.what());
        }
      }
      // Most common failure reason, used when nothing completed.
      std::map<FailureReason, std::size_t> counts;
      for (const auto& [idx, why] : failures) ++counts[why];
      FailureReason common = FailureReason::kCrash;
      std::size_t best = 0;
      for (const auto& [why, n] : counts) {
        if (n > best) {
          best = n;
          common = why;
        }
      }
      for (std::size_t o = 0; o < group.size(); ++o) {
        const std::size_t i = group[o];
        Selection sel{spec.name, d.name, d.metrics[i], std::nullopt, st.history.size(), failed};
        try {
          sel.params = select_best(st, o);
          chosen[job][i] = sel.params;
        } catch (const Error&) {
          no_choice_reason[job][i] = common;
          warn("no complete trial for " + job_label(spec, d) + ", metric " +
               std::string(to_string(d.metrics[i])));
        }
        selections[job].push_back(std::move(sel));
      }
    }
  });
  for (auto& s : selections) {
    for (auto& sel : s) out.selections.push_back(std::move(sel));
  }

  // Phase 2: every seed under the selected params.
  struct CellResult {
    std::size_t a, s, t;
    Cell cell;
  };
  const std::size_t eval_jobs = jobs * res.seeds.size();
  std::vector<std::vector<CellResult>> results(eval_jobs);
  parallel_for(eval_jobs, cfg.workers, [&](std::size_t e) {
    const std::size_t job = e / res.seeds.size();
    const std::size_t s = e % res.seeds.size();
    const std::size_t a = job / data.size();
    const LoadedDataset& d = data[job % data.size()];
    const RunnerSpec& spec = cfg.runners[a];
    auto& cells = results[e];
    if (!usable[a] || !d.graph) {
      for (std::size_t t : d.test_index) cells.push_back({a, s, t, Cell::failed(FailureReason::kCrash)});
      return;
    }
    // Metrics sharing a parameter set share one training run.
    std::vector<bool> done(d.metrics.size(), false);
    for (std::size_t i = 0; i < d.metrics.size(); ++i) {
      if (done[i]) continue;
      if (!chosen[job][i]) {
        cells.push_back({a, s, d.test_index[i], Cell::failed(no_choice_reason[job][i])});
        done[i] = true;
        continue;
      }
      std::vector<std::size_t> same;
      for (std::size_t j = i; j < d.metrics.size(); ++j) {
        if (!done[j] && chosen[job][j] && *chosen[job][j] == *chosen[job][i]) same.push_back(j);
      }
      const TrainRequest req = make_request(spec, res, d, *chosen[job][i], s);
      const TrainResponse resp = train_and_predict(spec, req, *d.graph, limits);
      std::vector<Metric> which;
      for (std::size_t j : same) which.push_back(d.metrics[j]);
      if (resp.status != RunStatus::kOk) {
        for (std::size_t j : same) cells.push_back({a, s, d.test_index[j], Cell::failed(to_failure(resp.status))});
        log.line("[eval] " + job_label(spec, d) + " seed " + std::to_string(res.seeds[s]) + ": " +
                 std::string(to_string(resp.status)) + (resp.error.empty() ? "" : " (" + resp.error + ")"));
      } else {
        const Graph& g = *d.graph;
        std::optional<std::span<const std::int32_t>> labels;
        if (g.has_labels()) labels = std::span<const std::int32_t>(*g.labels());
        const auto values =
            evaluate_all(g, Partition(resp.partition, g.k()), labels, d.splits[s]->test, which);
        for (std::size_t j : same) {
          const MetricResult& r = values.at(d.metrics[j]);
          cells.push_back({a, s, d.test_index[j],
                           r.value ? Cell::ok(r.value->value) : Cell::failed(FailureReason::kCrash)});
        }
      }
      for (std::size_t j : same) done[j] = true;
    }
  });
  for (const auto& batch : results) {
    for (const auto& c : batch) out.cube.set(c.a, c.s, c.t, c.cell);
  }
  log.line("[done] " + std::to_string(out.cube.cell_count()) + " cells");
  return out;
}

RegimeComparison compare_regimes(const ResultsCube& default_cube, const ResultsCube& hpo_cube) {
  RegimeComparison c;
  c.fcr = framework_comparison_rank(default_cube, hpo_cube, "default", "hpo");
  c.default_w = w_randomness_coefficient(default_cube);
  c.hpo_w = w_randomness_coefficient(hpo_cube);
  return c;
}

RegimeComparison compare_regimes(const BenchmarkConfig& cfg_default, const BenchmarkConfig& cfg_hpo,
                                 std::ostream* log) {
  BenchmarkConfig a = cfg_default, b = cfg_hpo;
  a.mode = b.mode = Mode::kHpo;
  if (a.canonical_text() != b.canonical_text()) {
    throw Error(ErrorKind::kConfig, "configs to compare must differ only in mode");
  }
  if (cfg_default.mode != Mode::kDefault || cfg_hpo.mode != Mode::kHpo) {
    throw Error(ErrorKind::kConfig, "compare needs one default-mode and one hpo-mode config");
  }
  const BenchmarkResult def = run_benchmark(cfg_default, log);
  const BenchmarkResult hpo = run_benchmark(cfg_hpo, log);
  return compare_regimes(def.cube, hpo.cube);
}

}  // namespace commbench
