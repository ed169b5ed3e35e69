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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "commbench/error.hpp"
#include "commbench/graph.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace commbench {
namespace {

using testing::make_graph;
using testing::temp_dir;

void write(const std::filesystem::path& p, const std::string& s) { std::ofstream(p) << s; }

std::filesystem::path tiny_bundle(const std::string& features = "1 0\n0 1\n1 1\n0 0\n") {
  auto dir = temp_dir("bundle");
  write(dir / "meta.txt", "name = tiny\nn = 4\nd = 2\nk = 2\nclasses = 2\n");
  write(dir / "edges.txt", "# u v w\n0 1\n1 2 0.5\n");
  write(dir / "features.txt", features);
  write(dir / "labels.txt", "0\n0\n1\n1\n");
  return dir;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::kIo;
}

TEST(GraphBuild, DropsSelfLoopsAndMergesDuplicatesKeepingMaxWeight) {
  GraphData d;
  d.node_count = 3;
  d.edges = {{0, 1, 0.3}, {1, 0, 0.9}, {2, 2, 1.0}, {1, 2, 1.0}};
  d.features = FeatureMatrix(3, 0, {});
  const Graph g = Graph::build(std::move(d));
  ASSERT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.self_loops_dropped(), 1u);
  EXPECT_EQ(g.duplicates_merged(), 1u);
  EXPECT_EQ(g.raw_entry_count(), 4u);
  EXPECT_DOUBLE_EQ(g.edges()[0].weight, 0.9);
  EXPECT_DOUBLE_EQ(g.weighted_degree(1), 1.9);
  EXPECT_DOUBLE_EQ(g.total_weight(), 1.9);
}

TEST(DatasetSummary, EdgeConventionSelectsRawEntriesOrUndirectedEdges) {
  GraphData d;
  d.node_count = 3;
  d.edges = {{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}};
  d.features = FeatureMatrix(3, 0, {});
  d.edge_convention = EdgeConvention::kEntries;
  GraphData u = d;
  u.edge_convention = EdgeConvention::kUndirected;
  const auto se = dataset_summary(Graph::build(std::move(d)));
  const auto su = dataset_summary(Graph::build(std::move(u)));
  EXPECT_EQ(se.edge_entries, 3u);
  EXPECT_EQ(se.undirected_edges, 2u);
  EXPECT_EQ(se.edges, 3u);
  EXPECT_EQ(su.edges, 2u);
}

TEST(GraphBuild, RejectsWeightsOutsideUnitInterval) {
  for (double w : {0.0, -1.0, 1.5}) {
    GraphData d;
    d.node_count = 2;
    d.edges = {{0, 1, w}};
    d.features = FeatureMatrix(2, 0, {});
    EXPECT_EQ(kind_of([&] { Graph::build(d); }), ErrorKind::kValidation) << w;
  }
}

TEST(GraphBuild, RejectsLabelsOutsideClassRange) {
  GraphData d;
  d.node_count = 2;
  d.features = FeatureMatrix(2, 0, {});
  d.labels = std::vector<std::int32_t>{0, 3};
  d.class_count = 2;
  EXPECT_EQ(kind_of([&] { Graph::build(d); }), ErrorKind::kValidation);
}

TEST(LoadDataset, ReadsTinyBundle) {
  const Graph g = load_dataset(tiny_bundle());
  EXPECT_EQ(g.name(), "tiny");
  EXPECT_EQ(g.node_count(), 4u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.feature_dim(), 2u);
  EXPECT_EQ(g.k(), 2u);
  EXPECT_EQ(g.class_count(), 2u);
  ASSERT_TRUE(g.has_labels());
  EXPECT_EQ(*g.labels(), (std::vector<std::int32_t>{0, 0, 1, 1}));
  EXPECT_DOUBLE_EQ(g.edges()[1].weight, 0.5);
}

TEST(LoadDataset, FeatureRowMismatchIsShapeError) {
  const auto dir = tiny_bundle("1 0\n0 1\n1 1\n0 0\n5 5\n");
  EXPECT_EQ(kind_of([&] { load_dataset(dir); }), ErrorKind::kShape);
}

TEST(LoadDataset, MissingBundleIsLoadError) {
  EXPECT_EQ(kind_of([] { load_dataset("/nonexistent/commbench/bundle"); }), ErrorKind::kLoad);
  const auto dir = tiny_bundle();
  std::filesystem::remove(dir / "edges.txt");
  EXPECT_EQ(kind_of([&] { load_dataset(dir); }), ErrorKind::kLoad);
}

TEST(LoadDataset, LabelOutOfRangeIsValidationError) {
  const auto dir = tiny_bundle();
  write(dir / "labels.txt", "0\n0\n1\n2\n");
  EXPECT_EQ(kind_of([&] { load_dataset(dir); }), ErrorKind::kValidation);
}

TEST(LoadDataset, SaveLoadRoundTripBinaryAndText) {
  PlantedPartitionConfig cfg;
  cfg.nodes = 40;
  cfg.blocks = 2;
  cfg.feature_dim = 3;
  const Graph g = make_planted_partition(cfg, 5);
  for (auto enc : {FeatureEncoding::kText, FeatureEncoding::kBinary}) {
    const auto dir = temp_dir("rt");
    save_dataset(g, dir, enc);
    const Graph h = load_dataset(dir);
    EXPECT_EQ(h.node_count(), g.node_count());
    EXPECT_EQ(h.edge_count(), g.edge_count());
    EXPECT_EQ(h.features(), g.features());
    EXPECT_EQ(h.labels(), g.labels());
    EXPECT_EQ(dataset_summary(h), dataset_summary(g));
  }
}

TEST(SplitNodes, SizesFollowFractions) {
  const Graph g = make_graph(100, {});
  const NodeSplits s = split_nodes(g, 0.8, 0.8, 42);
  EXPECT_EQ(s.test.size(), 20u);
  EXPECT_EQ(s.validation.size(), 16u);
  EXPECT_EQ(s.train.size(), 64u);
}

TEST(SplitNodes, DeterministicAndPartitioning) {
  const Graph g = make_graph(137, {});
  for (std::int64_t seed : {42, 24, 976, 12345}) {
    const NodeSplits a = split_nodes(g, 0.8, 0.8, seed);
    const NodeSplits b = split_nodes(g, 0.8, 0.8, seed);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.validation, b.validation);
    EXPECT_EQ(a.test, b.test);
    std::set<NodeId> all;
    all.insert(a.train.begin(), a.train.end());
    all.insert(a.validation.begin(), a.validation.end());
    all.insert(a.test.begin(), a.test.end());
    EXPECT_EQ(all.size(), 137u);
    EXPECT_EQ(a.train.size() + a.validation.size() + a.test.size(), 137u);
  }
  EXPECT_NE(split_nodes(g, 0.8, 0.8, 42).test, split_nodes(g, 0.8, 0.8, 24).test);
}

TEST(SplitNodes, TooSmallGraphIsSplitError) {
  EXPECT_EQ(kind_of([] { split_nodes(make_graph(2, {}), 0.8, 0.8, 42); }), ErrorKind::kSplit);
}

TEST(Statistics, HandValues) {
  EXPECT_DOUBLE_EQ(avg_clustering_coefficient(testing::triangle()), 1.0);
  EXPECT_DOUBLE_EQ(avg_clustering_coefficient(testing::path3()), 0.0);
  EXPECT_DOUBLE_EQ(mean_closeness_centrality(testing::triangle()), 1.0);
  EXPECT_NEAR(mean_closeness_centrality(testing::path3()), 7.0 / 9.0, 1e-15);
}

TEST(Statistics, DisconnectedClosenessConventions) {
  // Edge 0-1 plus isolated node 2: reachable-only gives 1 to nodes 0 and 1,
  // the component-scaled form multiplies by (r-1)/(N-1) = 1/2.
  const Graph g = make_graph(3, {{0, 1}});
  EXPECT_NEAR(mean_closeness_centrality(g, ClosenessConvention::kReachableOnly), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(mean_closeness_centrality(g), 1.0 / 3.0, 1e-15);
}

TEST(Statistics, EmptyGraphIsUndefined) {
  const Graph g = make_graph(0, {});
  EXPECT_EQ(kind_of([&] { avg_clustering_coefficient(g); }), ErrorKind::kUndefinedInput);
  EXPECT_EQ(kind_of([&] { mean_closeness_centrality(g); }), ErrorKind::kUndefinedInput);
  EXPECT_EQ(kind_of([&] { dataset_summary(g); }), ErrorKind::kUndefinedInput);
}

TEST(Statistics, SummaryOfTriangle) {
  const Graph g = make_graph(3, {{0, 1}, {1, 2}, {0, 2}}, std::vector<std::int32_t>{0, 0, 1}, 2);
  const DatasetSummary s = dataset_summary(g);
  EXPECT_EQ(s.nodes, 3u);
  EXPECT_EQ(s.edges, 3u);
  EXPECT_EQ(s.features, 2u);
  EXPECT_EQ(s.classes, 2u);
  EXPECT_DOUBLE_EQ(s.avg_clustering_coefficient, 1.0);
  EXPECT_DOUBLE_EQ(s.mean_closeness_centrality, 1.0);
}

TEST(Statistics, MatchBruteForceOraclesOnRandomGraphs) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 30;
    const double p = std::uniform_real_distribution<double>(0.05, 0.7)(gen);
    const auto adj = oracle::random_adjacency(n, p, gen);
    const Graph g = testing::from_dense(adj);
    EXPECT_NEAR(avg_clustering_coefficient(g), oracle::clustering_coefficient(adj), 1e-12);
    EXPECT_NEAR(mean_closeness_centrality(g), oracle::mean_closeness(adj), 1e-12);
  }
}

TEST(Statistics, InvariantUnderRelabelingAndBounded) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + gen() % 25;
    const auto adj = oracle::random_adjacency(n, 0.3, gen);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    oracle::DenseMatrix permuted(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) permuted[perm[i]][perm[j]] = adj[i][j];
    const Graph g = testing::from_dense(adj);
    const Graph h = testing::from_dense(permuted);
    const double cc = avg_clustering_coefficient(g);
    const double cl = mean_closeness_centrality(g);
    EXPECT_NEAR(cc, avg_clustering_coefficient(h), 1e-12);
    EXPECT_NEAR(cl, mean_closeness_centrality(h), 1e-12);
    EXPECT_GE(cc, 0.0);
    EXPECT_LE(cc, 1.0);
    EXPECT_GE(cl, 0.0);
    EXPECT_LE(cl, 1.0);
  }
}

TEST(PlantedPartition, DeterministicForSeed) {
  PlantedPartitionConfig cfg;
  const Graph a = make_planted_partition(cfg, 11);
  const Graph b = make_planted_partition(cfg, 11);
  EXPECT_EQ(dataset_summary(a), dataset_summary(b));
  EXPECT_EQ(a.features(), b.features());
  EXPECT_EQ(a.k(), cfg.blocks);
}

}  // namespace
}  // namespace commbench
