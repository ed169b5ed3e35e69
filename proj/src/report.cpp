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

#include "commbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "commbench/error.hpp"
#include "commbench/text.hpp"

namespace commbench {
namespace {

std::string fixed3(double x) { return format_fixed(x, 3); }

std::string reasons_text(const CellSummary& c) {
  std::string out;
  for (const auto& [why, n] : c.reasons) {
    if (!out.empty()) out += ", ";
    out += std::to_string(n) + " " + std::string(to_string(why));
  }
  return out;
}

std::string table_cell(const CellSummary& c) {
  const std::size_t n = c.ok + c.failed;
  if (!c.mean) return "FAILED (" + std::to_string(c.failed) + "/" + std::to_string(n) + ": " + reasons_text(c) + ")";
  std::string out = fixed3(*c.mean) + " ± " + fixed3(c.std);
  if (c.failed > 0) {
    out += " (" + std::to_string(c.failed) + "/" + std::to_string(n) + " failed: " + reasons_text(c) + ")";
  }
  return out;
}

std::vector<std::string> dataset_order(const ResultsCube& cube) {
  std::vector<std::string> out;
  for (const auto& t : cube.tests()) {
    if (std::find(out.begin(), out.end(), t.dataset) == out.end()) out.push_back(t.dataset);
  }
  return out;
}

std::string results_md(const ResultsCube& cube) {
  std::ostringstream out;
  out << "# Results\n\nMean ± standard deviation over seeds, computed on completed runs only.\n";
  for (const auto& ds : dataset_order(cube)) {
    std::vector<std::size_t> tests;
    for (std::size_t t = 0; t < cube.tests().size(); ++t) {
      if (cube.tests()[t].dataset == ds) tests.push_back(t);
    }
    out << "\n## " << ds << "\n\n| algorithm |";
    for (auto t : tests) out << ' ' << to_string(cube.tests()[t].metric) << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < tests.size(); ++i) out << "---|";
    out << '\n';
    for (std::size_t a = 0; a < cube.algorithms().size(); ++a) {
      out << "| " << cube.algorithms()[a] << " |";
      for (auto t : tests) out << ' ' << table_cell(summarize(cube, a, t)) << " |";
      out << '\n';
    }
  }
  return out.str();
}

std::string concordance_md(const ConcordanceReport& c) {
  std::ostringstream out;
  out << "# Concordance\n\n| test | W | W (tie-corrected) | tie fraction |\n|---|---|---|---|\n";
  for (const auto& t : c.per_test) {
    out << "| " << to_string(t.test) << " | " << fixed3(t.w) << " | " << fixed3(t.w_tie_corrected) << " | "
        << fixed3(t.tie_fraction) << " |\n";
  }
  out << "\nW Randomness Coefficient: " << fixed3(c.w_randomness) << " (std of W " << fixed3(c.w_std)
      << ")\n";
  if (c.w_randomness_tie_corrected) {
    out << "Tie-corrected W Randomness Coefficient: " << fixed3(*c.w_randomness_tie_corrected)
        << " (ties in " << fixed3(c.overall_tie_fraction) << " of comparisons)\n";
  }
  return out.str();
}

std::string summary_md(const RegimeComparison& cmp) {
  const auto& f = cmp.fcr;
  std::ostringstream out;
  out << "# Default vs HPO\n\n"
      << "| | Default | HPO |\n|---|---|---|\n"
      << "| W Randomness Coefficient | " << fixed3(cmp.default_w.w_randomness) << " | "
      << fixed3(cmp.hpo_w.w_randomness) << " |\n"
      << "| Framework Comparison Rank | " << fixed3(f.mean_rank[0]) << " ± " << fixed3(f.std_rank[0])
      << " | " << fixed3(f.mean_rank[1]) << " ± " << fixed3(f.std_rank[1]) << " |\n"
      << "\nPer-seed Framework Comparison Rank: " << fixed3(f.per_seed_mean_rank[0]) << " ± "
      << fixed3(f.per_seed_std_rank[0]) << " (Default), " << fixed3(f.per_seed_mean_rank[1]) << " ± "
      << fixed3(f.per_seed_std_rank[1]) << " (HPO)\n";
  return out.str();
}

std::string metrics_csv(const ResultsCube& cube) {
  std::ostringstream out;
  out << "algorithm,dataset,metric,mean,std,ok,failed\n";
  for (std::size_t a = 0; a < cube.algorithms().size(); ++a) {
    for (std::size_t t = 0; t < cube.tests().size(); ++t) {
      const CellSummary c = summarize(cube, a, t);
      out << csv_quote(cube.algorithms()[a]) << ',' << csv_quote(cube.tests()[t].dataset) << ',' << to_string(cube.tests()[t].metric)
          << ',' << (c.mean ? format_double(*c.mean) : "") << ',' << (c.mean ? format_double(c.std) : "")
          << ',' << c.ok << ',' << c.failed << '\n';
    }
  }
  return out.str();
}

std::string concordance_csv(const ConcordanceReport& c) {
  std::ostringstream out;
  out << "dataset,metric,w,w_tie_corrected,tie_fraction,all_failed_seeds\n";
  for (const auto& t : c.per_test) {
    out << csv_quote(t.test.dataset) << ',' << to_string(t.test.metric) << ',' << format_double(t.w) << ','
        << format_double(t.w_tie_corrected) << ',' << format_double(t.tie_fraction) << ','
        << t.all_failed_seeds << '\n';
  }
  return out.str();
}

std::string summary_csv(const RegimeComparison& cmp) {
  const auto& f = cmp.fcr;
  std::ostringstream out;
  out << "quantity,default,hpo\n"
      << "w_randomness," << format_double(cmp.default_w.w_randomness) << ','
      << format_double(cmp.hpo_w.w_randomness) << '\n'
      << "fcr_mean," << format_double(f.mean_rank[0]) << ',' << format_double(f.mean_rank[1]) << '\n'
      << "fcr_std," << format_double(f.std_rank[0]) << ',' << format_double(f.std_rank[1]) << '\n'
      << "fcr_per_seed_mean," << format_double(f.per_seed_mean_rank[0]) << ','
      << format_double(f.per_seed_mean_rank[1]) << '\n'
      << "fcr_per_seed_std," << format_double(f.per_seed_std_rank[0]) << ','
      << format_double(f.per_seed_std_rank[1]) << '\n';
  return out.str();
}

}  // namespace

CellSummary summarize(const ResultsCube& cube, std::size_t algorithm, std::size_t test) {
  CellSummary out;
  std::vector<double> xs;
  for (std::size_t s = 0; s < cube.seeds().size(); ++s) {
    const Cell& c = cube.at(algorithm, s, test);
    if (c.is_ok()) {
      xs.push_back(c.value);
    } else {
      ++out.failed;
      ++out.reasons[*c.failure];
    }
  }
  out.ok = xs.size();
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  out.mean = mean;
  out.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return out;
}

std::vector<std::filesystem::path> emit_report(const ResultsCube& cube, const ConcordanceReport& concord,
                                               const std::optional<RegimeComparison>& cmp,
                                               const std::filesystem::path& out_dir) {
  if (cube.algorithms().empty() || cube.seeds().empty() || cube.tests().empty()) {
    throw Error(ErrorKind::kValidation, "cannot report on an empty cube");
  }
  std::vector<std::pair<std::string, std::string>> files = {
      {"results.md", results_md(cube)},
      {"concordance.md", concordance_md(concord)},
      {"metrics.csv", metrics_csv(cube)},
      {"concordance.csv", concordance_csv(concord)},
  };
  if (cmp) {
    files.emplace_back("summary.md", summary_md(*cmp));
    files.emplace_back("summary.csv", summary_csv(*cmp));
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& [name, text] : files) {
    write_file_atomic(out_dir / name, text);
    written.push_back(out_dir / name);
  }
  return written;
}

}  // namespace commbench
