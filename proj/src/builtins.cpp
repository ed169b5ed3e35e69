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

// Desk-scale baseline clusterers. Each is a deterministic function of
// (graph, params, seed); iterative ones stop after `patience` iterations
// without improving their own objective.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <new>
#include <numeric>

#include "commbench/error.hpp"
#include "commbench/random.hpp"
#include "commbench/runner.hpp"

namespace commbench {
namespace {

using Assignment = std::vector<std::int32_t>;

struct Outcome {
  Assignment partition;
  std::int64_t epochs = 0;
};

std::int64_t int_param(const Params& p, const std::string& name, std::int64_t fallback,
                       std::int64_t lo, std::int64_t hi) {
  auto it = p.find(name);
  if (it == p.end()) return fallback;
  const auto x = as_number(it->second);
  if (!x || std::floor(*x) != *x || *x < static_cast<double>(lo) || *x > static_cast<double>(hi)) {
    throw Error(ErrorKind::kValidation, "parameter '" + name + "' must be an integer in [" +
                                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<std::int64_t>(*x);
}

std::uint64_t stream_seed(std::int64_t seed, std::string_view tag) {
  return mix_seed(static_cast<std::uint64_t>(seed), tag);
}

// --- k-means ---------------------------------------------------------------

double sq_dist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

struct LloydRun {
  Assignment assign;
  double inertia = std::numeric_limits<double>::infinity();
  std::int64_t iterations = 0;
};

LloydRun lloyd(const FeatureMatrix& x, std::size_t k, std::int64_t max_iter, std::int64_t patience,
               Rng& rng) {
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> centers(k * d);
  // k-means++ seeding.
  std::vector<double> closest(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t pick;
    const double total = std::accumulate(closest.begin(), closest.end(), 0.0);
    if (c == 0 || !(total > 0.0) || std::isinf(total)) {
      pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
    } else {
      pick = rng.weighted_index(closest);
    }
    std::copy_n(x.row(pick).data(), d, centers.begin() + static_cast<std::ptrdiff_t>(c * d));
    for (std::size_t i = 0; i < n; ++i) {
      closest[i] = std::min(closest[i], sq_dist(x.row(i).data(), &centers[c * d], d));
    }
  }

  LloydRun run;
  run.assign.assign(n, -1);
  double best = std::numeric_limits<double>::infinity();
  std::int64_t stall = 0;
  for (std::int64_t it = 0; it < max_iter; ++it) {
    ++run.iterations;
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t arg = 0;
      double dist = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dc = sq_dist(x.row(i).data(), &centers[c * d], d);
        if (dc < dist) {
          dist = dc;
          arg = c;
        }
      }
      inertia += dist;
      if (run.assign[i] != static_cast<std::int32_t>(arg)) {
        run.assign[i] = static_cast<std::int32_t>(arg);
        changed = true;
      }
    }
    run.inertia = inertia;
    if (!changed) break;
    if (inertia < best) {
      best = inertia;
      stall = 0;
    } else if (++stall >= patience) {
      break;
    }
    std::vector<double> sums(k * d, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(run.assign[i]);
      ++counts[c];
      for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += x.row(i)[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its center
      for (std::size_t j = 0; j < d; ++j) centers[c * d + j] = sums[c * d + j] / counts[c];
    }
  }
  return run;
}

Outcome kmeans(const TrainRequest& req, const Graph& g, std::size_t k) {
  const auto restarts = int_param(req.params, "restarts", 10, 1, 10);
  const auto max_iter = std::min(int_param(req.params, "max_iter", 300, 10, 300), req.max_epochs);
  const FeatureMatrix& x = g.features();
  if (x.cols() == 0) throw Error(ErrorKind::kValidation, "k-means needs node features");
  Outcome out;
  if (x.rows() == 0) return out;
  double best = std::numeric_limits<double>::infinity();
  const std::uint64_t base = stream_seed(req.seed, "kmeans");
  for (std::int64_t r = 0; r < restarts; ++r) {
    Rng rng(mix_seed(base, static_cast<std::uint64_t>(r)));
    LloydRun run = lloyd(x, k, max_iter, req.patience, rng);
    out.epochs += run.iterations;
    if (run.inertia < best) {
      best = run.inertia;
      out.partition = std::move(run.assign);
    }
  }
  return out;
}

// --- community merging shared by label propagation -------------------------

/// Relabels `labels` to 0..c-1 by first appearance, then merges the smallest
/// community into its most strongly connected neighbour until at most k remain.
Assignment merge_to_k(const Graph& g, const std::vector<std::size_t>& labels, std::size_t k) {
  const std::size_t n = g.node_count();
  std::map<std::size_t, std::size_t> dense;
  std::vector<std::size_t> comm(n);
  for (std::size_t v = 0; v < n; ++v) {
    comm[v] = dense.try_emplace(labels[v], dense.size()).first->second;
  }
  std::vector<std::vector<NodeId>> members(dense.size());
  for (std::size_t v = 0; v < n; ++v) members[comm[v]].push_back(static_cast<NodeId>(v));
  std::size_t alive = members.size();

  while (alive > k) {
    std::size_t small = members.size();
    for (std::size_t c = 0; c < members.size(); ++c) {
      if (members[c].empty()) continue;
      if (small == members.size() || members[c].size() < members[small].size()) small = c;
    }
    std::map<std::size_t, double> link;
    for (NodeId v : members[small]) {
      for (const auto& nb : g.neighbors(v)) {
        if (comm[nb.node] != small) link[comm[nb.node]] += nb.weight;
      }
    }
    std::size_t into = members.size();
    double strongest = 0.0;
    for (const auto& [c, w] : link) {
      if (w > strongest) {
        strongest = w;
        into = c;
      }
    }
    if (into == members.size()) {  // isolated: join the next smallest community
      for (std::size_t c = 0; c < members.size(); ++c) {
        if (c == small || members[c].empty()) continue;
        if (into == members.size() || members[c].size() < members[into].size()) into = c;
      }
    }
    for (NodeId v : members[small]) comm[v] = into;
    members[into].insert(members[into].end(), members[small].begin(), members[small].end());
    members[small].clear();
    --alive;
  }

  std::map<std::size_t, std::int32_t> final_ids;
  Assignment out(n);
  for (std::size_t v = 0; v < n; ++v) {
    out[v] = final_ids.try_emplace(comm[v], static_cast<std::int32_t>(final_ids.size())).first->second;
  }
  return out;
}

// --- label propagation -----------------------------------------------------

Outcome label_propagation(const TrainRequest& req, const Graph& g, std::size_t k) {
  const auto rounds = std::min(int_param(req.params, "max_rounds", 100, 1, 100), req.max_epochs);
  const std::size_t n = g.node_count();
  std::vector<std::size_t> label(n);
  std::iota(label.begin(), label.end(), 0);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(stream_seed(req.seed, "label_propagation"));

  Outcome out;
  std::size_t fewest = std::numeric_limits<std::size_t>::max();
  std::int64_t stall = 0;
  std::vector<std::pair<std::size_t, double>> tally;
  std::vector<std::size_t> tied;
  for (std::int64_t round = 0; round < rounds; ++round) {
    ++out.epochs;
    rng.shuffle(order);
    std::size_t changed = 0;
    for (NodeId v : order) {
      const auto nbs = g.neighbors(v);
      if (nbs.empty()) continue;
      tally.clear();
      for (const auto& nb : nbs) tally.emplace_back(label[nb.node], nb.weight);
      std::sort(tally.begin(), tally.end());
      double top = 0.0;
      std::size_t w = 0;
      for (std::size_t i = 0; i < tally.size(); i = w) {
        double sum = 0.0;
        for (w = i; w < tally.size() && tally[w].first == tally[i].first; ++w) sum += tally[w].second;
        tally[i].second = sum;
        top = std::max(top, sum);
      }
      tied.clear();
      bool keep = false;
      for (std::size_t i = 0; i < tally.size();) {
        const std::size_t l = tally[i].first;
        if (tally[i].second >= top * (1.0 - 1e-12)) {
          tied.push_back(l);
          keep |= l == label[v];
        }
        while (i < tally.size() && tally[i].first == l) ++i;
      }
      if (keep) continue;
      label[v] = tied[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(tied.size()) - 1))];
      ++changed;
    }
    if (changed == 0) break;
    if (changed < fewest) {
      fewest = changed;
      stall = 0;
    } else if (++stall >= req.patience) {
      break;
    }
  }
  out.partition = merge_to_k(g, label, k);
  return out;
}

// --- greedy modularity -----------------------------------------------------

Outcome greedy_modularity(const Graph& g, std::size_t k) {
  const std::size_t n = g.node_count();
  const double two_m = 2.0 * g.total_weight();
  std::vector<double> a(n, 0.0);
  std::vector<std::map<std::size_t, double>> e(n);  // e[i][j]: fraction of edge ends between i, j
  for (std::size_t v = 0; v < n; ++v) {
    if (two_m > 0.0) a[v] = g.weighted_degree(static_cast<NodeId>(v)) / two_m;
    for (const auto& nb : g.neighbors(static_cast<NodeId>(v))) {
      e[v][nb.node] += two_m > 0.0 ? nb.weight / two_m : 0.0;
    }
  }
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<bool> alive(n, true);
  std::size_t count = n;

  Outcome out;
  while (count > k) {
    std::size_t bi = n, bj = n;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (const auto& [j, eij] : e[i]) {
        if (j <= i) continue;
        const double dq = 2.0 * (eij - a[i] * a[j]);
        if (dq > best) {
          best = dq;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n) {
      // No connected pair left: joining i and j changes Q by -2 a_i a_j, so
      // take the two lightest communities.
      for (std::size_t i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        if (bi == n || a[i] < a[bi]) {
          bj = bi;
          bi = i;
        } else if (bj == n || a[i] < a[bj]) {
          bj = i;
        }
      }
      if (bi > bj) std::swap(bi, bj);
    }
    // Merge bj into bi.
    for (const auto& [x, w] : e[bj]) {
      if (x == bi) continue;
      e[bi][x] += w;
      e[x].erase(bj);
      e[x][bi] += w;
    }
    e[bi].erase(bj);
    e[bj].clear();
    a[bi] += a[bj];
    alive[bj] = false;
    parent[bj] = bi;
    --count;
    ++out.epochs;
  }

  std::map<std::size_t, std::int32_t> ids;
  out.partition.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t r = v;
    while (parent[r] != r) r = parent[r];
    out.partition[v] = ids.try_emplace(r, static_cast<std::int32_t>(ids.size())).first->second;
  }
  return out;
}

// --- random partition ------------------------------------------------------

Outcome random_partition(const TrainRequest& req, const Graph& g, std::size_t k) {
  Rng rng(stream_seed(req.seed, "random_partition"));
  Outcome out;
  out.epochs = 1;
  out.partition.resize(g.node_count());
  for (auto& c : out.partition) {
    c = static_cast<std::int32_t>(rng.uniform_int(0, static_cast<std::int64_t>(k) - 1));
  }
  return out;
}

}  // namespace

TrainResponse run_builtin(Builtin b, const TrainRequest& req, const Graph& g) {
  const auto start = std::chrono::steady_clock::now();
  TrainResponse resp;
  try {
    if (req.k < 1) throw Error(ErrorKind::kValidation, "k must be at least 1");
    if (req.max_epochs < 1) throw Error(ErrorKind::kValidation, "max_epochs must be at least 1");
    if (req.patience < 1) throw Error(ErrorKind::kValidation, "patience must be at least 1");
    const auto k = static_cast<std::size_t>(req.k);
    Outcome out;
    switch (b) {
      case Builtin::kKMeans: out = kmeans(req, g, k); break;
      case Builtin::kLabelPropagation: out = label_propagation(req, g, k); break;
      case Builtin::kGreedyModularity: out = greedy_modularity(g, k); break;
      case Builtin::kRandomPartition: out = random_partition(req, g, k); break;
    }
    resp.status = RunStatus::kOk;
    resp.partition = std::move(out.partition);
    resp.epochs_used = out.epochs;
  } catch (const std::bad_alloc&) {
    resp = {};
    resp.status = RunStatus::kOom;
    resp.error = "out of memory";
  } catch (const std::exception& e) {
    resp = {};
    resp.status = RunStatus::kCrash;
    resp.error = e.what();
  }
  resp.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return resp;
}

}  // namespace commbench
