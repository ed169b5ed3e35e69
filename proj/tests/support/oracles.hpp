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

// Brute-force reference implementations used only by tests. They share no
// code with the library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace commbench::oracle {

using DenseMatrix = std::vector<std::vector<double>>;

/// Local clustering via explicit triple loops over a dense 0/1 adjacency.
inline double clustering_coefficient(const DenseMatrix& adj) {
  const std::size_t n = adj.size();
  double total = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> nb;
    for (std::size_t u = 0; u < n; ++u) {
      if (u != v && adj[v][u] != 0.0) nb.push_back(u);
    }
    if (nb.size() < 2) continue;
    double links = 0.0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        if (adj[nb[i]][nb[j]] != 0.0) links += 1.0;
      }
    }
    total += links / (nb.size() * (nb.size() - 1) / 2.0);
  }
  return total / static_cast<double>(n);
}

/// Closeness from Floyd-Warshall distances, component-scaled.
inline double mean_closeness(const DenseMatrix& adj) {
  const std::size_t n = adj.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  DenseMatrix d(n, std::vector<double>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && adj[i][j] != 0.0) d[i][j] = 1.0;
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  double total = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    double sum = 0.0, reach = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (u != v && d[v][u] < kInf) {
        sum += d[v][u];
        reach += 1.0;
      }
    }
    if (sum > 0.0) total += (reach / sum) * (reach / (n - 1.0));
  }
  return total / static_cast<double>(n);
}

/// Sum over all ordered node pairs of [A_ij - k_i k_j / 2m] delta(c_i, c_j) / 2m.
inline double pairwise_modularity(const DenseMatrix& adj, const std::vector<int>& part) {
  const std::size_t n = adj.size();
  std::vector<double> deg(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      deg[i] += adj[i][j];
      two_m += adj[i][j];
    }
  }
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (part[i] == part[j]) q += adj[i][j] - deg[i] * deg[j] / two_m;
    }
  }
  return q / two_m;
}

/// Macro F1 maximized over every one-to-one mapping of classes to clusters,
/// computed from precision and recall counts.
inline double macro_f1_exhaustive(const std::vector<int>& pred, const std::vector<int>& labels,
                                  int k) {
  int classes = 0;
  for (int l : labels) classes = std::max(classes, l + 1);
  std::vector<bool> present(classes, false);
  for (int l : labels) present[l] = true;
  const int width = std::max(k, classes);
  std::vector<int> perm(width);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    // perm[c] is the cluster assigned to class c.
    double sum = 0.0;
    int counted = 0;
    for (int c = 0; c < classes; ++c) {
      if (!present[c]) continue;
      ++counted;
      const int cluster = perm[c];
      double tp = 0, pred_pos = 0, actual = 0;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (pred[i] == cluster) pred_pos += 1;
        if (labels[i] == c) actual += 1;
        if (pred[i] == cluster && labels[i] == c) tp += 1;
      }
      if (tp > 0) {
        const double precision = tp / pred_pos, recall = tp / actual;
        sum += 2 * precision * recall / (precision + recall);
      }
    }
    best = std::max(best, sum / counted);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Rank of item i among values: 1 + (#strictly better) + (#ties excluding i)/2.
/// Missing values are worse than every present value and tie among themselves.
inline std::vector<double> naive_ranks(const std::vector<std::optional<double>>& values,
                                       bool higher_better) {
  const std::size_t a = values.size();
  std::vector<double> ranks(a);
  for (std::size_t i = 0; i < a; ++i) {
    double better = 0, equal = 0;
    for (std::size_t j = 0; j < a; ++j) {
      if (j == i) continue;
      const auto& x = values[i];
      const auto& y = values[j];
      if (!x && !y) {
        equal += 1;
      } else if (!x) {
        better += 1;
      } else if (!y) {
        // y is failed, i is better
      } else if (*x == *y) {
        equal += 1;
      } else if (higher_better ? *y > *x : *y < *x) {
        better += 1;
      }
    }
    ranks[i] = 1.0 + better + equal / 2.0;
  }
  return ranks;
}

/// values[test][seed][algorithm]
inline double naive_w_randomness(
    const std::vector<std::vector<std::vector<std::optional<double>>>>& values,
    const std::vector<bool>& higher_better) {
  double sum_w = 0.0;
  for (std::size_t t = 0; t < values.size(); ++t) {
    const std::size_t n = values[t].size();
    const std::size_t a = values[t][0].size();
    std::vector<double> totals(a, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      const auto r = naive_ranks(values[t][s], higher_better[t]);
      for (std::size_t j = 0; j < a; ++j) totals[j] += r[j];
    }
    const double mean = std::accumulate(totals.begin(), totals.end(), 0.0) / a;
    double s_dev = 0.0;
    for (double x : totals) s_dev += (x - mean) * (x - mean);
    double w = 12.0 * s_dev / (double(n) * n * (double(a) * a * a - a));
    w = std::min(1.0, std::max(0.0, w));
    sum_w += w;
  }
  return 1.0 - sum_w / values.size();
}

/// Random simple graph as a dense 0/1 matrix.
inline DenseMatrix random_adjacency(std::size_t n, double p, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DenseMatrix adj(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (u(gen) < p) adj[i][j] = adj[j][i] = 1.0;
    }
  }
  return adj;
}

}  // namespace commbench::oracle
