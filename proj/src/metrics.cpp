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

#include "commbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace commbench {
namespace {

struct Contingency {
  std::size_t rows = 0;  // clusters
  std::size_t cols = 0;  // classes
  std::vector<double> counts;
  std::vector<double> row_sums;
  std::vector<double> col_sums;
  double total = 0.0;

  double at(std::size_t r, std::size_t c) const { return counts[r * cols + c]; }
};

Contingency contingency(const Partition& pred, std::span<const std::int32_t> labels,
                        std::span<const NodeId> subset) {
  if (labels.size() != pred.size()) {
    throw Error(ErrorKind::kShape, "label vector length " + std::to_string(labels.size()) +
                                       " differs from partition length " +
                                       std::to_string(pred.size()));
  }
  Contingency t;
  std::int32_t max_label = -1;
  for (NodeId u : subset) {
    if (u >= pred.size()) throw Error(ErrorKind::kValidation, "subset node outside partition");
    max_label = std::max(max_label, labels[u]);
  }
  t.rows = pred.k();
  t.cols = static_cast<std::size_t>(max_label + 1);
  t.counts.assign(t.rows * t.cols, 0.0);
  t.row_sums.assign(t.rows, 0.0);
  t.col_sums.assign(t.cols, 0.0);
  for (NodeId u : subset) {
    const auto r = static_cast<std::size_t>(pred[u]);
    const auto c = static_cast<std::size_t>(labels[u]);
    t.counts[r * t.cols + c] += 1.0;
    t.row_sums[r] += 1.0;
    t.col_sums[c] += 1.0;
    t.total += 1.0;
  }
  return t;
}

double entropy(const std::vector<double>& sums, double total) {
  double h = 0.0;
  for (double s : sums) {
    if (s > 0.0) h -= (s / total) * std::log(s / total);
  }
  return h;
}

}  // namespace

Partition::Partition(std::vector<std::int32_t> assignment, std::size_t k)
    : assignment_(std::move(assignment)), k_(k) {
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    if (assignment_[i] < 0 || static_cast<std::size_t>(assignment_[i]) >= k_) {
      throw Error(ErrorKind::kValidation, "node " + std::to_string(i) + " assigned cluster " +
                                              std::to_string(assignment_[i]) + " outside [0, " +
                                              std::to_string(k_) + ")");
    }
  }
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kF1: return "f1";
    case Metric::kNmi: return "nmi";
    case Metric::kModularity: return "modularity";
    case Metric::kConductance: return "conductance";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

Orientation orientation(Metric m) {
  return m == Metric::kConductance ? Orientation::kLowerBetter : Orientation::kHigherBetter;
}

bool is_supervised(Metric m) { return m == Metric::kF1 || m == Metric::kNmi; }

std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n) {
  // Shortest augmenting path with potentials (Kuhn-Munkres), O(n^3).
  // Rows and columns are 1-based internally; column 0 is a sentinel.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) {
    if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
  }
  return row_to_col;
}

MetricValue macro_f1(const Partition& pred, std::span<const std::int32_t> labels,
                     std::span<const NodeId> subset) {
  if (subset.empty()) return {0.0, MetricStatus::kDegenerate};
  const Contingency t = contingency(pred, labels, subset);

  // F1 of pairing cluster r with class c is 2*n_rc / (|r| + |c|), so the
  // macro-F1 of a matching is a sum of independent pair scores.
  const std::size_t n = std::max(t.rows, t.cols);
  std::vector<double> score(n * n, 0.0);
  for (std::size_t r = 0; r < t.rows; ++r) {
    for (std::size_t c = 0; c < t.cols; ++c) {
      const double overlap = t.at(r, c);
      if (overlap > 0.0) score[r * n + c] = 2.0 * overlap / (t.row_sums[r] + t.col_sums[c]);
    }
  }
  std::vector<double> cost(score.size());
  std::transform(score.begin(), score.end(), cost.begin(), [](double s) { return -s; });
  const auto assignment = solve_assignment(cost, n);

  double sum = 0.0;
  std::size_t classes_present = 0;
  for (std::size_t c = 0; c < t.cols; ++c) {
    if (t.col_sums[c] > 0.0) ++classes_present;
  }
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t c = assignment[r];
    if (r < t.rows && c < t.cols && t.col_sums[c] > 0.0) sum += score[r * n + c];
  }
  return {sum / static_cast<double>(classes_present), MetricStatus::kOk};
}

MetricValue nmi(const Partition& pred, std::span<const std::int32_t> labels,
                std::span<const NodeId> subset) {
  if (subset.empty()) return {0.0, MetricStatus::kDegenerate};
  const Contingency t = contingency(pred, labels, subset);
  const double h_pred = entropy(t.row_sums, t.total);
  const double h_true = entropy(t.col_sums, t.total);
  if (h_pred == 0.0 || h_true == 0.0) {
    // Zero entropy on both sides means both put every node in one group.
    if (h_pred == 0.0 && h_true == 0.0) return {1.0, MetricStatus::kOk};
    return {0.0, MetricStatus::kDegenerate};
  }
  double mi = 0.0;
  for (std::size_t r = 0; r < t.rows; ++r) {
    for (std::size_t c = 0; c < t.cols; ++c) {
      const double n_rc = t.at(r, c);
      if (n_rc > 0.0) {
        mi += (n_rc / t.total) * std::log(t.total * n_rc / (t.row_sums[r] * t.col_sums[c]));
      }
    }
  }
  const double value = mi / (0.5 * (h_pred + h_true));
  return {std::clamp(value, 0.0, 1.0), MetricStatus::kOk};
}

MetricValue modularity(const Graph& g, const Partition& pred) {
  const double m = g.total_weight();
  if (!(m > 0.0)) return {0.0, MetricStatus::kDegenerate};
  std::vector<double> intra(pred.k(), 0.0), volume(pred.k(), 0.0);
  for (const Edge& e : g.edges()) {
    if (pred[e.u] == pred[e.v]) intra[static_cast<std::size_t>(pred[e.u])] += e.weight;
  }
  for (NodeId u = 0; u < g.node_count(); ++u) {
    volume[static_cast<std::size_t>(pred[u])] += g.weighted_degree(u);
  }
  double q = 0.0;
  for (std::size_t c = 0; c < pred.k(); ++c) {
    const double share = volume[c] / (2.0 * m);
    q += intra[c] / m - share * share;
  }
  return {q, MetricStatus::kOk};
}

MetricValue conductance(const Graph& g, const Partition& pred,
                        ConductanceAggregation aggregation) {
  if (!(g.total_weight() > 0.0)) return {0.0, MetricStatus::kDegenerate};
  std::vector<double> cut(pred.k(), 0.0), volume(pred.k(), 0.0);
  std::vector<bool> non_empty(pred.k(), false);
  for (const Edge& e : g.edges()) {
    if (pred[e.u] != pred[e.v]) {
      cut[static_cast<std::size_t>(pred[e.u])] += e.weight;
      cut[static_cast<std::size_t>(pred[e.v])] += e.weight;
    }
  }
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto c = static_cast<std::size_t>(pred[u]);
    volume[c] += g.weighted_degree(u);
    non_empty[c] = true;
  }
  MetricValue out;
  double numerator = 0.0, denominator = 0.0;
  for (std::size_t c = 0; c < pred.k(); ++c) {
    if (!non_empty[c]) continue;
    if (!(volume[c] > 0.0)) {
      ++out.skipped_clusters;
      continue;
    }
    const double phi = cut[c] / volume[c];
    if (aggregation == ConductanceAggregation::kMean) {
      numerator += phi;
      denominator += 1.0;
    } else {
      numerator += phi * volume[c];
      denominator += volume[c];
    }
  }
  if (denominator == 0.0) {
    out.status = MetricStatus::kDegenerate;
    return out;
  }
  out.value = numerator / denominator;
  return out;
}

std::map<Metric, MetricResult> evaluate_all(const Graph& g, const Partition& pred,
                                            std::optional<std::span<const std::int32_t>> labels,
                                            std::span<const NodeId> subset,
                                            std::span<const Metric> which) {
  std::map<Metric, MetricResult> out;
  for (Metric m : which) {
    MetricResult& r = out[m];
    try {
      if (is_supervised(m) && !labels) {
        throw Error(ErrorKind::kUnsupportedMetric,
                    std::string(to_string(m)) + " needs ground-truth labels");
      }
      switch (m) {
        case Metric::kF1: r.value = macro_f1(pred, *labels, subset); break;
        case Metric::kNmi: r.value = nmi(pred, *labels, subset); break;
        case Metric::kModularity: r.value = modularity(g, pred); break;
        case Metric::kConductance: r.value = conductance(g, pred); break;
      }
    } catch (const Error& e) {
      r.error = e;
    }
  }
  return out;
}

}  // namespace commbench
