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

#include "commbench/cli.hpp"

#include <spawn.h>
#include <sys/wait.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "commbench/concordance.hpp"
#include "commbench/graph.hpp"
#include "commbench/orchestrator.hpp"
#include "commbench/report.hpp"
#include "commbench/runner.hpp"
#include "commbench/store.hpp"
#include "commbench/text.hpp"

extern char** environ;

namespace commbench {
namespace {

using nlohmann::json;

/// A cube file or a results CSV, told apart by the cube header.
StoredCube load_any_cube(const std::string& path) {
  const std::string text = read_file(path);
  if (text.rfind("commbench-cube", 0) == 0) return parse_cube(text, path);
  StoredCube s;
  s.cube = parse_results_csv(text, path);
  return s;
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

json concordance_json(const ConcordanceReport& c) {
  json tests = json::array();
  for (const auto& t : c.per_test) {
    tests.push_back({{"dataset", t.test.dataset},
                     {"metric", to_string(t.test.metric)},
                     {"w", t.w},
                     {"w_tie_corrected", t.w_tie_corrected},
                     {"tie_fraction", t.tie_fraction},
                     {"all_failed_seeds", t.all_failed_seeds}});
  }
  return {{"w_randomness", c.w_randomness},
          {"w_std", c.w_std},
          {"tie_fraction", c.overall_tie_fraction},
          {"w_randomness_tie_corrected",
           c.w_randomness_tie_corrected ? json(*c.w_randomness_tie_corrected) : json(nullptr)},
          {"tests", tests}};
}

json conformance_json(const ConformanceReport& r) {
  json phases = json::array();
  for (const auto& p : r.phases) phases.push_back({{"name", p.name}, {"passed", p.passed}, {"detail", p.detail}});
  return {{"runner", r.runner}, {"passed", r.passed()}, {"phases", phases}};
}

void print_concordance(const ConcordanceReport& c, std::ostream& out) {
  std::size_t width = 4;
  for (const auto& t : c.per_test) width = std::max(width, to_string(t.test).size());
  auto pad = [&](std::string s) {
    s.resize(width + 2, ' ');
    return s;
  };
  out << pad("test") << "W      W(tc)  ties\n";
  for (const auto& t : c.per_test) {
    out << pad(to_string(t.test)) << format_fixed(t.w, 3) << "  " << format_fixed(t.w_tie_corrected, 3) << "  "
        << format_fixed(t.tie_fraction, 3) << '\n';
  }
  out << "W Randomness Coefficient: " << format_fixed(c.w_randomness, 3) << '\n';
  if (c.w_randomness_tie_corrected) {
    out << "W Randomness Coefficient (tie-corrected): " << format_fixed(*c.w_randomness_tie_corrected, 3) << '\n';
  }
}

std::optional<std::int64_t> source_date_epoch() {
  const char* v = std::getenv("SOURCE_DATE_EPOCH");
  if (!v) return std::nullopt;
  return parse_number<std::int64_t>(v);
}

int spawn_and_wait(const std::vector<std::string>& argv) {
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  pid_t pid = 0;
  if (posix_spawnp(&pid, args[0], nullptr, nullptr, args.data(), environ) != 0) {
    throw Error(ErrorKind::kIo, "cannot start " + argv[0]);
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw Error(ErrorKind::kIo, "waitpid failed");
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : kExitRuntime;
}

std::string fetch_script() {
  if (const char* env = std::getenv("COMMBENCH_FETCH_SCRIPT")) return env;
#ifdef COMMBENCH_FETCH_SCRIPT
  return COMMBENCH_FETCH_SCRIPT;
#else
  return "tools/fetch_datasets.py";
#endif
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kLoad:
    case ErrorKind::kShape:
    case ErrorKind::kIo:
      return kExitInput;
    case ErrorKind::kParse:
    case ErrorKind::kMigration:
      return kExitFormat;
    case ErrorKind::kValidation:
    case ErrorKind::kSplit:
    case ErrorKind::kUndefinedInput:
    case ErrorKind::kUnsupportedMetric:
    case ErrorKind::kConfig:
    case ErrorKind::kBudget:
    case ErrorKind::kSelection:
      return kExitValidation;
    case ErrorKind::kAlignment:
      return kExitAlignment;
    case ErrorKind::kProtocol:
      return kExitRuntime;
  }
  return kExitRuntime;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Benchmark graph clustering algorithms and measure ranking consistency.", "commbench"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  bool as_json = false;
  app.add_flag("--json", as_json, "print one JSON document instead of text");

  // stats
  auto* stats = app.add_subcommand("stats", "print dataset statistics");
  std::string stats_path, closeness = "component-scaled";
  stats->add_option("dataset", stats_path, "dataset bundle directory")->required();
  stats->add_option("--closeness", closeness, "component-scaled or reachable-only")
      ->check(CLI::IsMember({"component-scaled", "reachable-only"}));

  // run
  auto* run = app.add_subcommand("run", "run a benchmark and save its cube");
  std::string run_config, run_out = "results.cube", run_report;
  std::vector<std::string> run_sets;
  std::optional<std::size_t> run_workers;
  bool run_quiet = false, run_timestamp = false;
  run->add_option("config", run_config, "benchmark config file")->required();
  run->add_option("-o,--out", run_out, "cube file to write (default results.cube)");
  run->add_option("--set", run_sets, "override a config key: key=value (repeatable)");
  run->add_option("--workers", run_workers, "parallel jobs");
  run->add_option("--report", run_report, "also write report files to this directory");
  run->add_flag("--timestamp", run_timestamp, "record the current time in the cube");
  run->add_flag("-q,--quiet", run_quiet, "no progress output");

  // compare
  auto* compare = app.add_subcommand("compare", "framework comparison rank and W of two cubes");
  std::string cmp_a, cmp_b;
  std::vector<std::string> cmp_names;
  compare->add_option("cube_a", cmp_a, "first cube or CSV (e.g. default mode)")->required();
  compare->add_option("cube_b", cmp_b, "second cube or CSV (e.g. HPO mode)")->required();
  compare->add_option("--names", cmp_names, "labels for the two cubes")->delimiter(',')->expected(2);

  // rank
  auto* rank = app.add_subcommand("rank", "concordance of one cube");
  std::string rank_path;
  rank->add_option("cube", rank_path, "cube file or results CSV")->required();

  // report
  auto* report = app.add_subcommand("report", "write report files for a cube");
  std::string rep_path, rep_out, rep_default;
  report->add_option("cube", rep_path, "cube file or results CSV")->required();
  report->add_option("--out", rep_out, "output directory")->required();
  report->add_option("--default", rep_default, "default-mode cube; adds the Default vs HPO summary");

  // validate-runner
  auto* validate = app.add_subcommand("validate-runner", "run the protocol conformance suite");
  std::string val_spec;
  double val_timeout = 600.0;
  validate->add_option("spec", val_spec, "runner spec file or builtin:<name>")->required();
  validate->add_option("--timeout", val_timeout, "seconds per exchange")->check(CLI::PositiveNumber);

  // fetch-datasets
  auto* fetch = app.add_subcommand("fetch-datasets", "download the public dataset bundles");
  std::string fetch_dest = "data", fetch_source;
  std::vector<std::string> fetch_names;
  fetch->add_option("--dest", fetch_dest, "output directory (default data)");
  fetch->add_option("--source", fetch_source, "base URL or local directory of the upstream files");
  fetch->add_option("datasets", fetch_names, "texas, cornell, wisc, karate");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*stats) {
      const Graph g = load_dataset(stats_path);
      DatasetSummary s = dataset_summary(g);
      if (closeness == "reachable-only") {
        s.mean_closeness_centrality = mean_closeness_centrality(g, ClosenessConvention::kReachableOnly);
      }
      if (as_json) {
        out << json{{"name", s.name},
                    {"nodes", s.nodes},
                    {"edges", s.edges},
                    {"undirected_edges", s.undirected_edges},
                    {"edge_entries", s.edge_entries},
                    {"features", s.features},
                    {"classes", s.classes},
                    {"avg_clustering_coefficient", s.avg_clustering_coefficient},
                    {"mean_closeness_centrality", s.mean_closeness_centrality}}
                   .dump(2)
            << '\n';
      } else {
        out << "name=" << s.name << "\nnodes=" << s.nodes << "\nedges=" << s.edges
            << "\nundirected_edges=" << s.undirected_edges << "\nedge_entries=" << s.edge_entries
            << "\nfeatures=" << s.features << "\nclasses=" << s.classes
            << "\navg_clustering_coefficient=" << format_fixed(s.avg_clustering_coefficient, 6)
            << "\nmean_closeness_centrality=" << format_fixed(s.mean_closeness_centrality, 6) << '\n';
      }
      return kExitOk;
    }

    if (*run) {
      std::vector<std::pair<std::string, std::string>> overrides;
      for (const auto& kv : run_sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
          err << "error: --set expects key=value, got '" << kv << "'\n";
          return kExitUsage;
        }
        overrides.emplace_back(std::string(trim(kv.substr(0, eq))), std::string(trim(kv.substr(eq + 1))));
      }
      if (run_workers) overrides.emplace_back("workers", std::to_string(*run_workers));
      const BenchmarkConfig cfg = load_benchmark_config(run_config, overrides);
      const BenchmarkResult result = run_benchmark(cfg, run_quiet ? nullptr : &err);
      StoredCube stored{kCubeFormatVersion, cfg.fingerprint(), source_date_epoch(), result.cube};
      if (run_timestamp) stored.created = static_cast<std::int64_t>(std::time(nullptr));
      save_cube(stored, run_out);

      std::size_t failed = 0;
      for (std::size_t a = 0; a < result.cube.algorithms().size(); ++a)
        for (std::size_t s = 0; s < result.cube.seeds().size(); ++s)
          for (std::size_t t = 0; t < result.cube.tests().size(); ++t) failed += !result.cube.at(a, s, t).is_ok();

      std::vector<std::string> report_files;
      if (!run_report.empty()) {
        ConcordanceReport concord;
        try {
          concord = w_randomness_coefficient(result.cube);
        } catch (const Error& e) {
          err << "warning: concordance not computed: " << e.what() << '\n';
        }
        for (const auto& p : emit_report(result.cube, concord, std::nullopt, run_report)) {
          report_files.push_back(p.string());
        }
      }
      if (as_json) {
        json selections = json::array();
        for (const auto& s : result.selections) {
          selections.push_back({{"algorithm", s.algorithm},
                                {"dataset", s.dataset},
                                {"metric", to_string(s.metric)},
                                {"params", s.params ? to_json(*s.params) : json(nullptr)},
                                {"trials", s.trials},
                                {"failed_trials", s.failed_trials}});
        }
        json conformance = json::array();
        for (const auto& c : result.conformance) conformance.push_back(conformance_json(c));
        out << json{{"cube", run_out},
                    {"fingerprint", stored.fingerprint},
                    {"cells", result.cube.cell_count()},
                    {"failed_cells", failed},
                    {"selections", selections},
                    {"conformance", conformance},
                    {"warnings", result.warnings},
                    {"report_files", report_files}}
                   .dump(2)
            << '\n';
      } else {
        out << "wrote " << run_out << ": " << result.cube.cell_count() << " cells, " << failed << " failed\n"
            << "fingerprint " << stored.fingerprint << '\n';
        for (const auto& f : report_files) out << "wrote " << f << '\n';
      }
      return kExitOk;
    }

    if (*compare) {
      const StoredCube a = load_any_cube(cmp_a);
      const StoredCube b = load_any_cube(cmp_b);
      std::string na = stem_of(cmp_a), nb = stem_of(cmp_b);
      if (cmp_names.size() == 2) {
        na = cmp_names[0];
        nb = cmp_names[1];
      } else if (na == nb) {
        na = "A";
        nb = "B";
      }
      const ComparisonReport f = framework_comparison_rank(a.cube, b.cube, na, nb);
      const ConcordanceReport wa = w_randomness_coefficient(a.cube);
      const ConcordanceReport wb = w_randomness_coefficient(b.cube);
      if (as_json) {
        json contenders = json::array();
        for (int i = 0; i < 2; ++i) {
          const ConcordanceReport& w = i == 0 ? wa : wb;
          contenders.push_back({{"name", f.contender[i]},
                                {"fcr_mean", f.mean_rank[i]},
                                {"fcr_std", f.std_rank[i]},
                                {"fcr_per_seed_mean", f.per_seed_mean_rank[i]},
                                {"fcr_per_seed_std", f.per_seed_std_rank[i]},
                                {"w_randomness", w.w_randomness},
                                {"w_randomness_tie_corrected", w.w_randomness_tie_corrected
                                                                   ? json(*w.w_randomness_tie_corrected)
                                                                   : json(nullptr)}});
        }
        out << json{{"contenders", contenders}}.dump(2) << '\n';
      } else {
        out << "Framework Comparison Rank (seed means)\n";
        for (int i = 0; i < 2; ++i) {
          out << "  " << f.contender[i] << ": " << format_fixed(f.mean_rank[i], 3) << " ± "
              << format_fixed(f.std_rank[i], 3) << '\n';
        }
        out << "Framework Comparison Rank (per seed)\n";
        for (int i = 0; i < 2; ++i) {
          out << "  " << f.contender[i] << ": " << format_fixed(f.per_seed_mean_rank[i], 3) << " ± "
              << format_fixed(f.per_seed_std_rank[i], 3) << '\n';
        }
        out << "W Randomness Coefficient\n"
            << "  " << f.contender[0] << ": " << format_fixed(wa.w_randomness, 3) << '\n'
            << "  " << f.contender[1] << ": " << format_fixed(wb.w_randomness, 3) << '\n';
      }
      return kExitOk;
    }

    if (*rank) {
      const ConcordanceReport c = w_randomness_coefficient(load_any_cube(rank_path).cube);
      if (as_json) {
        out << concordance_json(c).dump(2) << '\n';
      } else {
        print_concordance(c, out);
      }
      return kExitOk;
    }

    if (*report) {
      const StoredCube cube = load_any_cube(rep_path);
      const ConcordanceReport concord = w_randomness_coefficient(cube.cube);
      std::optional<RegimeComparison> cmp;
      if (!rep_default.empty()) cmp = compare_regimes(load_any_cube(rep_default).cube, cube.cube);
      const auto files = emit_report(cube.cube, concord, cmp, rep_out);
      if (as_json) {
        json list = json::array();
        for (const auto& p : files) list.push_back(p.string());
        out << json{{"files", list}}.dump(2) << '\n';
      } else {
        for (const auto& p : files) out << "wrote " << p.string() << '\n';
      }
      return kExitOk;
    }

    if (*validate) {
      RunnerSpec spec;
      if (val_spec.rfind("builtin:", 0) == 0) {
        const auto b = parse_builtin(std::string_view(val_spec).substr(8));
        if (!b) throw Error(ErrorKind::kConfig, "unknown builtin runner '" + val_spec + "'");
        spec = builtin_spec(*b);
      } else {
        spec = load_runner_spec(val_spec);
      }
      const ConformanceReport r = validate_runner(spec, RunLimits{val_timeout, 0});
      if (as_json) {
        out << conformance_json(r).dump(2) << '\n';
      } else {
        for (const auto& p : r.phases) {
          out << (p.passed ? "PASS " : "FAIL ") << p.name;
          if (!p.detail.empty()) out << ": " << p.detail;
          out << '\n';
        }
        out << (r.passed() ? "runner " + r.runner + " conforms\n"
                           : "runner " + r.runner + " failed at " + r.failed_phase() + "\n");
      }
      return r.passed() ? kExitOk : kExitValidation;
    }

    if (*fetch) {
      std::vector<std::string> argv = {"python3", fetch_script(), "--dest", fetch_dest};
      if (!fetch_source.empty()) {
        argv.push_back("--source");
        argv.push_back(fetch_source);
      }
      argv.insert(argv.end(), fetch_names.begin(), fetch_names.end());
      out.flush();
      const int code = spawn_and_wait(argv);
      if (as_json) out << json{{"exit_code", code}}.dump(2) << '\n';
      return code;
    }
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    if (as_json) {
      out << json{{"error", {{"kind", to_string(e.kind())}, {"message", e.what()}, {"exit_code", code}}}}.dump(2)
          << '\n';
    }
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return code;
  } catch (const std::exception& e) {
    if (as_json) {
      out << json{{"error", {{"kind", "runtime"}, {"message", e.what()}, {"exit_code", 1}}}}.dump(2) << '\n';
    }
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace commbench
