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

#include "commbench/concordance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace commbench {
namespace {

bool usable(const Cell& c) { return c.is_ok() && std::isfinite(c.value); }

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd population_stats(const std::vector<double>& xs) {
  if (xs.empty()) return {};
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

/// Ranks two reduced values; `nullopt` means no usable value.
std::pair<double, double> head_to_head(std::optional<double> a, std::optional<double> b,
                                       Orientation orient) {
  if (!a && !b) return {1.5, 1.5};
  if (!a) return {2.0, 1.0};
  if (!b) return {1.0, 2.0};
  if (*a == *b) return {1.5, 1.5};
  const bool a_better = orient == Orientation::kHigherBetter ? *a > *b : *a < *b;
  return a_better ? std::pair{1.0, 2.0} : std::pair{2.0, 1.0};
}

}  // namespace

std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::kOom: return "oom";
    case FailureReason::kTimeout: return "timeout";
    case FailureReason::kCrash: return "crash";
    case FailureReason::kNonfinite: return "nonfinite";
  }
  return "?";
}

std::optional<FailureReason> parse_failure_reason(std::string_view name) {
  for (auto r : {FailureReason::kOom, FailureReason::kTimeout, FailureReason::kCrash,
                 FailureReason::kNonfinite}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

std::string to_string(const TestPoint& t) {
  return t.dataset + "/" + std::string(to_string(t.metric));
}

ResultsCube::ResultsCube(std::vector<std::string> algorithms, std::vector<std::int64_t> seeds,
                         std::vector<TestPoint> tests)
    : algorithms_(std::move(algorithms)),
      seeds_(std::move(seeds)),
      tests_(std::move(tests)),
      cells_(algorithms_.size() * seeds_.size() * tests_.size()) {}

void ResultsCube::set(std::size_t algorithm, std::size_t seed, std::size_t test, Cell cell) {
  if (cell.is_ok() && !std::isfinite(cell.value)) cell = Cell::failed(FailureReason::kNonfinite);
  cells_.at(index(algorithm, seed, test)) = cell;
}

const Cell& ResultsCube::at(std::size_t algorithm, std::size_t seed, std::size_t test) const {
  const auto& c = cells_.at(index(algorithm, seed, test));
  if (!c) {
    throw Error(ErrorKind::kValidation, "cube cell (" + algorithms_.at(algorithm) + ", " +
                                            std::to_string(seeds_.at(seed)) + ", " +
                                            to_string(tests_.at(test)) + ") is absent");
  }
  return *c;
}

bool ResultsCube::has(std::size_t algorithm, std::size_t seed, std::size_t test) const {
  return cells_.at(index(algorithm, seed, test)).has_value();
}

bool ResultsCube::is_complete() const {
  return std::all_of(cells_.begin(), cells_.end(), [](const auto& c) { return c.has_value(); });
}

std::optional<std::size_t> ResultsCube::algorithm_index(std::string_view name) const {
  for (std::size_t i = 0; i < algorithms_.size(); ++i) {
    if (algorithms_[i] == name) return i;
  }
  return std::nullopt;
}

SeedRanks rank_within_seed(std::span<const Cell> values, Orientation orient) {
  const std::size_t a = values.size();
  SeedRanks out;
  out.ranks.assign(a, 0.0);

  std::vector<std::size_t> order;
  std::vector<std::size_t> failed;
  for (std::size_t i = 0; i < a; ++i) (usable(values[i]) ? order : failed).push_back(i);
  out.all_failed = order.empty();

  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return orient == Orientation::kHigherBetter ? values[x].value > values[y].value
                                                : values[x].value < values[y].value;
  });
  std::size_t pos = 0;
  while (pos < order.size()) {
    std::size_t end = pos + 1;
    while (end < order.size() && values[order[end]].value == values[order[pos]].value) ++end;
    // Positions pos..end-1 hold ranks pos+1..end.
    const double shared = 0.5 * static_cast<double>(pos + 1 + end);
    for (std::size_t i = pos; i < end; ++i) out.ranks[order[i]] = shared;
    pos = end;
  }
  if (!failed.empty()) {
    const double shared = 0.5 * static_cast<double>(order.size() + 1 + a);
    for (std::size_t i : failed) out.ranks[i] = shared;
  }
  return out;
}

KendallW kendall_w(const RankMatrix& ranks, bool tie_corrected) {
  const std::size_t n = ranks.seeds;
  const std::size_t a = ranks.algorithms;
  if (n < 2 || a < 2) {
    throw Error(ErrorKind::kUndefinedInput,
                "Kendall's W needs at least 2 seeds and 2 algorithms (got " + std::to_string(n) +
                    " x " + std::to_string(a) + ")");
  }
  const auto nd = static_cast<double>(n);
  const auto ad = static_cast<double>(a);
  const double mean_total = nd * (ad + 1.0) / 2.0;
  double s = 0.0;
  for (std::size_t j = 0; j < a; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += ranks.at(i, j);
    s += (total - mean_total) * (total - mean_total);
  }
  double denominator = nd * nd * (ad * ad * ad - ad);
  if (tie_corrected) {
    double ties = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(ranks.ranks.begin() + static_cast<std::ptrdiff_t>(i * a),
                              ranks.ranks.begin() + static_cast<std::ptrdiff_t>((i + 1) * a));
      std::sort(row.begin(), row.end());
      for (std::size_t p = 0; p < a;) {
        std::size_t q = p + 1;
        while (q < a && row[q] == row[p]) ++q;
        const auto t = static_cast<double>(q - p);
        ties += t * t * t - t;
        p = q;
      }
    }
    denominator -= nd * ties;
  }
  if (!(denominator > 0.0)) return {0.0, s};
  return {std::clamp(12.0 * s / denominator, 0.0, 1.0), s};
}

double tie_fraction(const RankMatrix& ranks) {
  std::size_t pairs = 0, tied = 0;
  for (std::size_t i = 0; i < ranks.seeds; ++i) {
    for (std::size_t x = 0; x < ranks.algorithms; ++x) {
      for (std::size_t y = x + 1; y < ranks.algorithms; ++y) {
        ++pairs;
        if (ranks.at(i, x) == ranks.at(i, y)) ++tied;
      }
    }
  }
  return pairs == 0 ? 0.0 : static_cast<double>(tied) / static_cast<double>(pairs);
}

RankMatrix rank_matrix(const ResultsCube& cube, std::size_t test) {
  RankMatrix m;
  m.seeds = cube.seeds().size();
  m.algorithms = cube.algorithms().size();
  m.ranks.reserve(m.seeds * m.algorithms);
  const Orientation orient = orientation(cube.tests().at(test).metric);
  std::vector<Cell> row(m.algorithms);
  for (std::size_t s = 0; s < m.seeds; ++s) {
    for (std::size_t a = 0; a < m.algorithms; ++a) row[a] = cube.at(a, s, test);
    const auto ranked = rank_within_seed(row, orient);
    m.ranks.insert(m.ranks.end(), ranked.ranks.begin(), ranked.ranks.end());
  }
  return m;
}

ConcordanceReport w_randomness_coefficient(const ResultsCube& cube) {
  if (cube.tests().empty()) {
    throw Error(ErrorKind::kUndefinedInput, "W randomness coefficient of an empty test suite");
  }
  ConcordanceReport report;
  std::vector<double> ws, ws_corrected;
  std::size_t pairs = 0;
  double tied_pairs = 0.0;
  const std::size_t a = cube.algorithms().size();
  const std::size_t per_test_pairs = cube.seeds().size() * a * (a >= 2 ? a - 1 : 0) / 2;
  for (std::size_t t = 0; t < cube.tests().size(); ++t) {
    const RankMatrix ranks = rank_matrix(cube, t);
    TestConcordance tc;
    tc.test = cube.tests()[t];
    const KendallW plain = kendall_w(ranks);
    tc.w = plain.w;
    tc.s = plain.s;
    tc.w_tie_corrected = kendall_w(ranks, true).w;
    tc.tie_fraction = tie_fraction(ranks);
    for (std::size_t s = 0; s < cube.seeds().size(); ++s) {
      bool any_ok = false;
      for (std::size_t j = 0; j < a; ++j) any_ok = any_ok || usable(cube.at(j, s, t));
      if (!any_ok) ++tc.all_failed_seeds;
    }
    pairs += per_test_pairs;
    tied_pairs += tc.tie_fraction * static_cast<double>(per_test_pairs);
    ws.push_back(tc.w);
    ws_corrected.push_back(tc.w_tie_corrected);
    report.per_test.push_back(std::move(tc));
  }
  const MeanStd stats = population_stats(ws);
  report.w_randomness = 1.0 - stats.mean;
  report.w_std = stats.std;
  report.overall_tie_fraction = pairs == 0 ? 0.0 : tied_pairs / static_cast<double>(pairs);
  if (report.overall_tie_fraction > 0.10) {
    report.w_randomness_tie_corrected = 1.0 - population_stats(ws_corrected).mean;
  }
  return report;
}

ComparisonReport framework_comparison_rank(const ResultsCube& a, const ResultsCube& b,
                                           std::string name_a, std::string name_b,
                                           SeedReduction /*reduce*/) {
  if (a.algorithms() != b.algorithms() || a.seeds() != b.seeds() || a.tests() != b.tests()) {
    throw Error(ErrorKind::kAlignment,
                "cubes differ in their algorithm, seed or test axes and cannot be compared");
  }
  if (a.tests().empty() || a.algorithms().empty()) {
    throw Error(ErrorKind::kUndefinedInput, "framework comparison of an empty cube");
  }
  ComparisonReport report;
  report.contender[0] = std::move(name_a);
  report.contender[1] = std::move(name_b);

  auto reduce_mean = [](const ResultsCube& cube, std::size_t alg,
                        std::size_t test) -> std::optional<double> {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t s = 0; s < cube.seeds().size(); ++s) {
      const Cell& c = cube.at(alg, s, test);
      if (usable(c)) {
        sum += c.value;
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
  };

  std::vector<double> ranks[2], seed_ranks[2];
  for (std::size_t t = 0; t < a.tests().size(); ++t) {
    const Orientation orient = orientation(a.tests()[t].metric);
    for (std::size_t alg = 0; alg < a.algorithms().size(); ++alg) {
      const auto ra = reduce_mean(a, alg, t);
      const auto rb = reduce_mean(b, alg, t);
      const auto [rank_a, rank_b] = head_to_head(ra, rb, orient);
      ComparisonEntry e;
      e.test = a.tests()[t];
      e.algorithm = a.algorithms()[alg];
      e.reduced[0] = ra.value_or(std::nan(""));
      e.reduced[1] = rb.value_or(std::nan(""));
      e.rank[0] = rank_a;
      e.rank[1] = rank_b;
      ranks[0].push_back(rank_a);
      ranks[1].push_back(rank_b);
      report.entries.push_back(std::move(e));

      for (std::size_t s = 0; s < a.seeds().size(); ++s) {
        const Cell& ca = a.at(alg, s, t);
        const Cell& cb = b.at(alg, s, t);
        const auto [sa, sb] =
            head_to_head(usable(ca) ? std::optional(ca.value) : std::nullopt,
                         usable(cb) ? std::optional(cb.value) : std::nullopt, orient);
        seed_ranks[0].push_back(sa);
        seed_ranks[1].push_back(sb);
      }
    }
  }
  for (int i = 0; i < 2; ++i) {
    const MeanStd reduced = population_stats(ranks[i]);
    report.mean_rank[i] = reduced.mean;
    report.std_rank[i] = reduced.std;
    const MeanStd per_seed = population_stats(seed_ranks[i]);
    report.per_seed_mean_rank[i] = per_seed.mean;
    report.per_seed_std_rank[i] = per_seed.std;
  }
  return report;
}

}  // namespace commbench
