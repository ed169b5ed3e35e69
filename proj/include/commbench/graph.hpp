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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace commbench {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 1.0;
};

struct Neighbor {
  NodeId node = 0;
  double weight = 1.0;
};

/// Dense row-major N x d feature matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// How the published edge count of a dataset is defined.
enum class EdgeConvention { kUndirected, kEntries };

/// Raw material for a Graph. Graph::build normalizes and validates it.
struct GraphData {
  std::string name;
  std::size_t node_count = 0;
  std::vector<Edge> edges;
  bool directed = false;
  FeatureMatrix features;
  std::optional<std::vector<std::int32_t>> labels;
  std::size_t class_count = 0;  // 0 = derive from labels
  std::size_t k = 0;            // 0 = use class_count
  EdgeConvention edge_convention = EdgeConvention::kUndirected;
};

/// Immutable attributed, weighted, undirected graph with optional labels.
///
/// Construction drops self-loops and merges duplicate undirected edges, keeping
/// the maximum weight. Edge weights must lie in (0, 1].
class Graph {
 public:
  static Graph build(GraphData data);

  const std::string& name() const { return name_; }
  std::size_t node_count() const { return node_count_; }
  /// Undirected edges with u < v, sorted lexicographically.
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  /// Number of adjacency entries in the input before normalization.
  std::size_t raw_entry_count() const { return raw_entry_count_; }
  std::size_t self_loops_dropped() const { return self_loops_dropped_; }
  std::size_t duplicates_merged() const { return duplicates_merged_; }
  bool directed() const { return directed_; }
  EdgeConvention edge_convention() const { return edge_convention_; }

  std::span<const Neighbor> neighbors(NodeId u) const {
    return {adjacency_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }
  /// Sum of incident edge weights.
  double weighted_degree(NodeId u) const { return weighted_degree_[u]; }
  double total_weight() const { return total_weight_; }

  const FeatureMatrix& features() const { return features_; }
  std::size_t feature_dim() const { return features_.cols(); }
  const std::optional<std::vector<std::int32_t>>& labels() const { return labels_; }
  bool has_labels() const { return labels_.has_value(); }
  std::size_t class_count() const { return class_count_; }
  std::size_t k() const { return k_; }

 private:
  Graph() = default;

  std::string name_;
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::size_t raw_entry_count_ = 0;
  std::size_t self_loops_dropped_ = 0;
  std::size_t duplicates_merged_ = 0;
  bool directed_ = false;
  EdgeConvention edge_convention_ = EdgeConvention::kUndirected;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<double> weighted_degree_;
  double total_weight_ = 0.0;
  FeatureMatrix features_;
  std::optional<std::vector<std::int32_t>> labels_;
  std::size_t class_count_ = 0;
  std::size_t k_ = 0;
};

struct NodeSplits {
  std::vector<NodeId> train;
  std::vector<NodeId> validation;
  std::vector<NodeId> test;
  std::int64_t seed = 0;
};

/// Shuffles node ids with `seed`; the last (1 - train_frac) share becomes the
/// test set and, of the remainder, (1 - val_frac_of_train) becomes validation.
/// Sizes are rounded to the nearest node. Throws kSplit when any split would
/// be empty.
NodeSplits split_nodes(const Graph& g, double train_frac, double val_frac_of_train,
                       std::int64_t seed);

enum class ClosenessConvention {
  kComponentScaled,  // ((r-1)/(N-1)) * ((r-1)/sum d)
  kReachableOnly,    // (r-1)/sum d
};

/// Mean local clustering coefficient, ignoring weights; nodes with degree < 2
/// contribute 0.
double avg_clustering_coefficient(const Graph& g);

/// Mean closeness centrality over unweighted shortest paths. Nodes with no
/// reachable peer have closeness 0.
double mean_closeness_centrality(
    const Graph& g, ClosenessConvention convention = ClosenessConvention::kComponentScaled);

struct DatasetSummary {
  std::string name;
  std::size_t nodes = 0;
  /// Edge count under the dataset's published convention: raw entries as
  /// listed in the bundle, or merged undirected edges.
  std::size_t edges = 0;
  std::size_t undirected_edges = 0;
  std::size_t edge_entries = 0;
  std::size_t features = 0;
  std::size_t classes = 0;
  double avg_clustering_coefficient = 0.0;
  double mean_closeness_centrality = 0.0;

  friend bool operator==(const DatasetSummary&, const DatasetSummary&) = default;
};

DatasetSummary dataset_summary(const Graph& g);

// Dataset bundles (layout documented in docs/formats.md).

enum class BundleFormat { kEdgeListBundle };

enum class FeatureEncoding { kText, kBinary };

Graph load_dataset(const std::filesystem::path& path,
                   BundleFormat format = BundleFormat::kEdgeListBundle);

void save_dataset(const Graph& g, const std::filesystem::path& path,
                  FeatureEncoding encoding = FeatureEncoding::kText);

/// Parameters for a planted-partition (stochastic block) graph with Gaussian
/// feature blobs centred per block.
struct PlantedPartitionConfig {
  std::string name = "planted";
  std::size_t nodes = 200;
  std::size_t blocks = 4;
  double p_in = 0.2;
  double p_out = 0.01;
  std::size_t feature_dim = 16;
  /// Distance between block centres relative to unit feature noise.
  double feature_separation = 6.0;
};

Graph make_planted_partition(const PlantedPartitionConfig& cfg, std::uint64_t seed);

}  // namespace commbench
