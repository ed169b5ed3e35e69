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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "commbench/error.hpp"
#include "commbench/graph.hpp"

namespace commbench {

/// Hard cluster assignment: every node gets exactly one id in [0, k).
class Partition {
 public:
  Partition() = default;
  /// Throws kValidation when an id falls outside [0, k).
  Partition(std::vector<std::int32_t> assignment, std::size_t k);

  std::size_t size() const { return assignment_.size(); }
  std::size_t k() const { return k_; }
  std::int32_t operator[](std::size_t node) const { return assignment_[node]; }
  const std::vector<std::int32_t>& assignment() const { return assignment_; }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::int32_t> assignment_;
  std::size_t k_ = 0;
};

enum class Metric { kF1, kNmi, kModularity, kConductance };
enum class Orientation { kHigherBetter, kLowerBetter };

inline constexpr Metric kAllMetrics[] = {Metric::kF1, Metric::kNmi, Metric::kModularity,
                                         Metric::kConductance};

std::string_view to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view name);
Orientation orientation(Metric m);
bool is_supervised(Metric m);

enum class MetricStatus { kOk, kDegenerate };

struct MetricValue {
  double value = 0.0;
  MetricStatus status = MetricStatus::kOk;
  /// Conductance only: clusters skipped because their volume is zero.
  std::size_t skipped_clusters = 0;
};

/// Macro-averaged F1 over the label classes present in `subset`, after
/// aligning clusters to classes with the assignment that maximizes the summed
/// per-class F1 (Hungarian method on the contingency-derived F1 table).
/// Classes left without a cluster score 0.
MetricValue macro_f1(const Partition& pred, std::span<const std::int32_t> labels,
                     std::span<const NodeId> subset);

/// Mutual information normalized by the arithmetic mean of the two entropies.
MetricValue nmi(const Partition& pred, std::span<const std::int32_t> labels,
                std::span<const NodeId> subset);

/// Weighted Newman modularity on the full graph.
MetricValue modularity(const Graph& g, const Partition& pred);

enum class ConductanceAggregation { kMean, kVolumeWeighted };

/// Per-cluster cut/volume, averaged over clusters with non-zero volume.
MetricValue conductance(const Graph& g, const Partition& pred,
                        ConductanceAggregation aggregation = ConductanceAggregation::kMean);

struct MetricResult {
  std::optional<MetricValue> value;
  std::optional<Error> error;
};

/// Supervised metrics use `subset`; unsupervised ones use the full graph. A
/// failing metric records its error and the rest are still computed.
std::map<Metric, MetricResult> evaluate_all(const Graph& g, const Partition& pred,
                                            std::optional<std::span<const std::int32_t>> labels,
                                            std::span<const NodeId> subset,
                                            std::span<const Metric> which);

/// Minimum-cost perfect assignment on a square cost matrix (row-major).
/// Returns the column assigned to each row.
std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n);

}  // namespace commbench
