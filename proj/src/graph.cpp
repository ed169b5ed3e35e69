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

#include "commbench/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "commbench/error.hpp"
#include "commbench/random.hpp"

namespace commbench {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorKind::kShape, "feature matrix has " + std::to_string(values_.size()) +
                                       " values, expected " + std::to_string(rows_) + "x" +
                                       std::to_string(cols_));
  }
}

Graph Graph::build(GraphData data) {
  Graph g;
  g.name_ = std::move(data.name);
  g.node_count_ = data.node_count;
  g.directed_ = data.directed;
  g.edge_convention_ = data.edge_convention;
  g.raw_entry_count_ = data.edges.size();

  const std::size_t n = data.node_count;
  std::vector<Edge> edges;
  edges.reserve(data.edges.size());
  for (const Edge& e : data.edges) {
    if (e.u >= n || e.v >= n) {
      throw Error(ErrorKind::kValidation, "edge (" + std::to_string(e.u) + ", " +
                                              std::to_string(e.v) + ") has an endpoint outside [0, " +
                                              std::to_string(n) + ")");
    }
    if (!(e.weight > 0.0 && e.weight <= 1.0)) {
      throw Error(ErrorKind::kValidation, "edge (" + std::to_string(e.u) + ", " +
                                              std::to_string(e.v) + ") weight " +
                                              std::to_string(e.weight) + " outside (0, 1]");
    }
    if (e.u == e.v) {
      ++g.self_loops_dropped_;
      continue;
    }
    edges.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.weight});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : (a.v != b.v ? a.v < b.v : a.weight > b.weight);
  });
  // Sorted by weight descending within a pair, so the first copy holds the max.
  for (const Edge& e : edges) {
    if (!g.edges_.empty() && g.edges_.back().u == e.u && g.edges_.back().v == e.v) {
      ++g.duplicates_merged_;
      continue;
    }
    g.edges_.push_back(e);
  }

  g.offsets_.assign(n + 1, 0);
  for (const Edge& e : g.edges_) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.adjacency_.resize(g.offsets_[n]);
  g.weighted_degree_.assign(n, 0.0);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const Edge& e : g.edges_) {
    g.adjacency_[cursor[e.u]++] = {e.v, e.weight};
    g.adjacency_[cursor[e.v]++] = {e.u, e.weight};
    g.weighted_degree_[e.u] += e.weight;
    g.weighted_degree_[e.v] += e.weight;
    g.total_weight_ += e.weight;
  }
  for (std::size_t u = 0; u < n; ++u) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u + 1]),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }

  if (data.features.rows() != n) {
    throw Error(ErrorKind::kShape, "feature matrix has " + std::to_string(data.features.rows()) +
                                       " rows for " + std::to_string(n) + " nodes");
  }
  g.features_ = std::move(data.features);

  std::size_t classes = data.class_count;
  if (data.labels) {
    if (data.labels->size() != n) {
      throw Error(ErrorKind::kShape, "label vector has " + std::to_string(data.labels->size()) +
                                         " entries for " + std::to_string(n) + " nodes");
    }
    std::int32_t max_label = -1;
    for (std::int32_t l : *data.labels) max_label = std::max(max_label, l);
    if (classes == 0) classes = static_cast<std::size_t>(max_label + 1);
    for (std::int32_t l : *data.labels) {
      if (l < 0 || static_cast<std::size_t>(l) >= classes) {
        throw Error(ErrorKind::kValidation, "label " + std::to_string(l) + " outside [0, " +
                                                std::to_string(classes) + ")");
      }
    }
  }
  g.labels_ = std::move(data.labels);
  g.class_count_ = classes;
  g.k_ = data.k != 0 ? data.k : classes;
  return g;
}

NodeSplits split_nodes(const Graph& g, double train_frac, double val_frac_of_train,
                       std::int64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0) ||
      !(val_frac_of_train > 0.0 && val_frac_of_train < 1.0)) {
    throw Error(ErrorKind::kSplit, "split fractions must lie in (0, 1)");
  }
  const std::size_t n = g.node_count();
  const auto test_count =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * (1.0 - train_frac)));
  const std::size_t remainder = n - std::min(n, test_count);
  const auto val_count = static_cast<std::size_t>(
      std::llround(static_cast<double>(remainder) * (1.0 - val_frac_of_train)));
  if (test_count == 0 || test_count >= n || val_count == 0 || val_count >= remainder) {
    throw Error(ErrorKind::kSplit, "graph with " + std::to_string(n) +
                                       " nodes is too small for non-empty train/validation/test "
                                       "splits");
  }

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  Rng rng(mix_seed(static_cast<std::uint64_t>(seed), "split_nodes"));
  rng.shuffle(order);

  NodeSplits s;
  s.seed = seed;
  const std::size_t train_count = remainder - val_count;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_count));
  s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(train_count),
                      order.begin() + static_cast<std::ptrdiff_t>(remainder));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(remainder), order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.validation.begin(), s.validation.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

double avg_clustering_coefficient(const Graph& g) {
  const std::size_t n = g.node_count();
  if (n == 0) throw Error(ErrorKind::kUndefinedInput, "clustering coefficient of an empty graph");

  // Mark-array triangle counting over sorted adjacency lists.
  std::vector<std::uint32_t> mark(n, 0);
  std::uint32_t stamp = 0;
  double total = 0.0;
  for (NodeId u = 0; u < n; ++u) {
    const auto nbrs = g.neighbors(u);
    const std::size_t deg = nbrs.size();
    if (deg < 2) continue;
    ++stamp;
    for (const Neighbor& x : nbrs) mark[x.node] = stamp;
    std::size_t links = 0;
    for (const Neighbor& x : nbrs) {
      for (const Neighbor& y : g.neighbors(x.node)) {
        if (y.node > x.node && mark[y.node] == stamp) ++links;
      }
    }
    total += 2.0 * static_cast<double>(links) / (static_cast<double>(deg) * (deg - 1));
  }
  return total / static_cast<double>(n);
}

double mean_closeness_centrality(const Graph& g, ClosenessConvention convention) {
  const std::size_t n = g.node_count();
  if (n == 0) throw Error(ErrorKind::kUndefinedInput, "closeness centrality of an empty graph");
  if (n == 1) return 0.0;

  std::vector<std::int64_t> dist(n);
  std::vector<NodeId> queue(n);
  double total = 0.0;
  for (NodeId source = 0; source < n; ++source) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[source] = 0;
    std::size_t head = 0, tail = 0;
    queue[tail++] = source;
    std::int64_t dist_sum = 0;
    while (head < tail) {
      const NodeId u = queue[head++];
      for (const Neighbor& x : g.neighbors(u)) {
        if (dist[x.node] < 0) {
          dist[x.node] = dist[u] + 1;
          dist_sum += dist[x.node];
          queue[tail++] = x.node;
        }
      }
    }
    const auto reached = static_cast<double>(tail - 1);
    if (dist_sum == 0) continue;
    double c = reached / static_cast<double>(dist_sum);
    if (convention == ClosenessConvention::kComponentScaled) {
      c *= reached / static_cast<double>(n - 1);
    }
    total += c;
  }
  return total / static_cast<double>(n);
}

DatasetSummary dataset_summary(const Graph& g) {
  DatasetSummary s;
  s.name = g.name();
  s.nodes = g.node_count();
  s.undirected_edges = g.edge_count();
  s.edge_entries = g.raw_entry_count();
  s.edges = g.edge_convention() == EdgeConvention::kEntries ? s.edge_entries : s.undirected_edges;
  s.features = g.feature_dim();
  s.classes = g.class_count();
  s.avg_clustering_coefficient = avg_clustering_coefficient(g);
  s.mean_closeness_centrality = mean_closeness_centrality(g);
  return s;
}

Graph make_planted_partition(const PlantedPartitionConfig& cfg, std::uint64_t seed) {
  if (cfg.blocks == 0 || cfg.nodes < cfg.blocks) {
    throw Error(ErrorKind::kConfig, "planted partition needs at least one node per block");
  }
  Rng rng(mix_seed(seed, "planted_partition"));
  GraphData data;
  data.name = cfg.name;
  data.node_count = cfg.nodes;
  std::vector<std::int32_t> labels(cfg.nodes);
  for (std::size_t i = 0; i < cfg.nodes; ++i) {
    labels[i] = static_cast<std::int32_t>(i * cfg.blocks / cfg.nodes);
  }
  for (NodeId u = 0; u < cfg.nodes; ++u) {
    for (NodeId v = u + 1; v < cfg.nodes; ++v) {
      const double p = labels[u] == labels[v] ? cfg.p_in : cfg.p_out;
      if (rng.uniform01() < p) data.edges.push_back({u, v, 1.0});
    }
  }
  // Block centres are scaled one-hot directions so every pair sits at the
  // same distance; this needs feature_dim >= blocks.
  const std::size_t d = std::max(cfg.feature_dim, cfg.blocks);
  const double offset = cfg.feature_separation / std::sqrt(2.0);
  std::vector<double> values(cfg.nodes * d);
  for (std::size_t i = 0; i < cfg.nodes; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double x = rng.normal();
      if (j == static_cast<std::size_t>(labels[i])) x += offset;
      values[i * d + j] = x;
    }
  }
  data.features = FeatureMatrix(cfg.nodes, d, std::move(values));
  data.labels = std::move(labels);
  data.class_count = cfg.blocks;
  data.k = cfg.blocks;
  return Graph::build(std::move(data));
}

}  // namespace commbench
