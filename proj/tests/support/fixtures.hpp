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

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "commbench/graph.hpp"
#include "oracles.hpp"

namespace commbench::testing {

inline Graph make_graph(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges,
                        std::optional<std::vector<std::int32_t>> labels = std::nullopt,
                        std::size_t feature_dim = 1) {
  GraphData d;
  d.name = "fixture";
  d.node_count = n;
  for (auto [u, v] : edges) d.edges.push_back({u, v, 1.0});
  d.features = FeatureMatrix(n, feature_dim, std::vector<double>(n * feature_dim, 0.0));
  d.labels = std::move(labels);
  return Graph::build(std::move(d));
}

inline Graph triangle() { return make_graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

inline Graph path3() { return make_graph(3, {{0, 1}, {1, 2}}); }

/// Triangles {0,1,2} and {3,4,5} joined by the bridge 2-3.
inline Graph two_triangles(std::optional<std::vector<std::int32_t>> labels = std::nullopt) {
  return make_graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}}, std::move(labels));
}

inline Graph from_dense(const oracle::DenseMatrix& adj) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t i = 0; i < adj.size(); ++i)
    for (std::size_t j = i + 1; j < adj.size(); ++j)
      if (adj[i][j] != 0.0) edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
  return make_graph(adj.size(), edges);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::mt19937_64 gen(std::random_device{}());
  auto dir = std::filesystem::temp_directory_path() /
             ("commbench-" + tag + "-" + std::to_string(gen() % 1000000000));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace commbench::testing
