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

#include "commbench/hpo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

#include "commbench/error.hpp"

namespace commbench {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Bounds of a numeric dimension in the space the kernels live in: log for
/// log-uniform, widened by half a step for integers.
std::pair<double, double> internal_bounds(const Dimension& d) {
  switch (d.kind) {
    case DimensionKind::kLogUniform: return {std::log(d.low), std::log(d.high)};
    case DimensionKind::kIntUniform: return {d.low - 0.5, d.high + 0.5};
    default: return {d.low, d.high};
  }
}

double to_internal(const Dimension& d, const ParamValue& v) {
  const double x = as_number(v).value_or(0.0);
  return d.kind == DimensionKind::kLogUniform ? std::log(x) : x;
}

ParamValue from_internal(const Dimension& d, double x) {
  switch (d.kind) {
    case DimensionKind::kLogUniform:
      return std::clamp(std::exp(x), d.low, d.high);
    case DimensionKind::kIntUniform: {
      const double r = std::clamp(std::round(x), d.low, d.high);
      return static_cast<std::int64_t>(r);
    }
    default: return std::clamp(x, d.low, d.high);
  }
}

/// Truncated-Gaussian mixture over one numeric dimension.
class NumericParzen {
 public:
  NumericParzen(const Dimension& dim, const std::vector<double>& obs, double prior_weight)
      : dim_(dim) {
    std::tie(low_, high_) = internal_bounds(dim);
    const double range = high_ - low_;
    // Scott's rule, floored so a handful of points cannot collapse the
    // estimator onto themselves.
    double sigma = range;
    if (obs.size() >= 2) {
      const double mean = std::accumulate(obs.begin(), obs.end(), 0.0) / obs.size();
      double ss = 0.0;
      for (double x : obs) ss += (x - mean) * (x - mean);
      const double sd = std::sqrt(ss / static_cast<double>(obs.size() - 1));
      sigma = 1.06 * sd * std::pow(static_cast<double>(obs.size()), -0.2);
    }
    const double floor = range / std::min(100.0, 1.0 + static_cast<double>(obs.size()));
    sigma = std::clamp(sigma, floor, range);
    if (!(sigma > 0.0)) sigma = 1.0;
    for (double x : obs) kernels_.push_back({x, sigma, 1.0});
    kernels_.push_back({0.5 * (low_ + high_), range > 0.0 ? range : 1.0, prior_weight});
    for (const auto& k : kernels_) total_weight_ += k.weight;
  }

  double sample(Rng& rng) const {
    std::vector<double> w;
    w.reserve(kernels_.size());
    for (const auto& k : kernels_) w.push_back(k.weight);
    const Kernel& k = kernels_[rng.weighted_index(w)];
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double x = k.mu + k.sigma * rng.normal();
      if (x >= low_ && x <= high_) return x;
    }
    return rng.uniform(low_, high_);
  }

  double log_density(double x) const {
    double p = 0.0;
    for (const auto& k : kernels_) {
      const double mass = normal_cdf((high_ - k.mu) / k.sigma) - normal_cdf((low_ - k.mu) / k.sigma);
      if (!(mass > 0.0)) continue;
      double density;
      if (dim_.kind == DimensionKind::kIntUniform) {
        density = normal_cdf((x + 0.5 - k.mu) / k.sigma) - normal_cdf((x - 0.5 - k.mu) / k.sigma);
      } else {
        const double z = (x - k.mu) / k.sigma;
        density = std::exp(-0.5 * z * z) / (k.sigma * std::sqrt(2.0 * 3.14159265358979323846));
      }
      p += k.weight * density / mass;
    }
    return std::log(std::max(p / total_weight_, 1e-300));
  }

 private:
  struct Kernel {
    double mu;
    double sigma;
    double weight;
  };
  const Dimension& dim_;
  double low_ = 0.0, high_ = 1.0;
  std::vector<Kernel> kernels_;
  double total_weight_ = 0.0;
};

class CategoricalParzen {
 public:
  CategoricalParzen(const Dimension& dim, const std::vector<ParamValue>& obs, double prior_weight)
      : weights_(dim.choices.size(), prior_weight / static_cast<double>(dim.choices.size())),
        dim_(dim) {
    for (const auto& v : obs) {
      for (std::size_t i = 0; i < dim.choices.size(); ++i) {
        if (dim.choices[i] == v) weights_[i] += 1.0;
      }
    }
    total_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  }

  ParamValue sample(Rng& rng) const { return dim_.choices[rng.weighted_index(weights_)]; }

  double log_density(const ParamValue& v) const {
    for (std::size_t i = 0; i < dim_.choices.size(); ++i) {
      if (dim_.choices[i] == v) return std::log(weights_[i] / total_);
    }
    return std::log(1e-300);
  }

 private:
  std::vector<double> weights_;
  const Dimension& dim_;
  double total_ = 1.0;
};

/// l(x) or g(x): one estimator per dimension, fitted on the trials where the
/// dimension was active.
class JointParzen {
 public:
  JointParzen(const SearchSpace& space, const std::vector<const Trial*>& trials,
              double prior_weight)
      : space_(space) {
    for (const auto& d : space.dimensions()) {
      if (d.kind == DimensionKind::kCategorical) {
        std::vector<ParamValue> obs;
        for (const Trial* t : trials) {
          if (auto it = t->params.find(d.name); it != t->params.end()) obs.push_back(it->second);
        }
        categorical_.emplace_back(std::in_place, d, obs, prior_weight);
        numeric_.emplace_back(std::nullopt);
      } else {
        std::vector<double> obs;
        for (const Trial* t : trials) {
          if (auto it = t->params.find(d.name); it != t->params.end()) {
            obs.push_back(to_internal(d, it->second));
          }
        }
        numeric_.emplace_back(std::in_place, d, obs, prior_weight);
        categorical_.emplace_back(std::nullopt);
      }
    }
  }

  Params sample(Rng& rng) const {
    Params p;
    const auto& dims = space_.dimensions();
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (!space_.is_active(dims[i], p)) continue;
      if (categorical_[i]) {
        p[dims[i].name] = categorical_[i]->sample(rng);
      } else {
        p[dims[i].name] = from_internal(dims[i], numeric_[i]->sample(rng));
      }
    }
    return p;
  }

  double log_density(const Params& p) const {
    double total = 0.0;
    const auto& dims = space_.dimensions();
    for (std::size_t i = 0; i < dims.size(); ++i) {
      auto it = p.find(dims[i].name);
      if (it == p.end()) continue;
      total += categorical_[i] ? categorical_[i]->log_density(it->second)
                               : numeric_[i]->log_density(to_internal(dims[i], it->second));
    }
    return total;
  }

 private:
  const SearchSpace& space_;
  std::vector<std::optional<CategoricalParzen>> categorical_;
  std::vector<std::optional<NumericParzen>> numeric_;
};

/// Fronts of the given candidate indices, best first.
std::vector<std::vector<std::size_t>> pareto_fronts(std::span<const Trial> trials,
                                                    const std::vector<std::size_t>& ids) {
  const std::size_t m = ids.size();
  std::vector<std::vector<std::size_t>> dominated_by(m);
  std::vector<std::size_t> domination_count(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto& a = trials[ids[i]].objectives;
      const auto& b = trials[ids[j]].objectives;
      if (dominates(a, b)) {
        dominated_by[i].push_back(j);
        ++domination_count[j];
      } else if (dominates(b, a)) {
        dominated_by[j].push_back(i);
        ++domination_count[i];
      }
    }
  }
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < m; ++i) {
    if (domination_count[i] == 0) current.push_back(i);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : current) {
      for (std::size_t j : dominated_by[i]) {
        if (--domination_count[j] == 0) next.push_back(j);
      }
    }
    std::vector<std::size_t> front;
    for (std::size_t i : current) front.push_back(ids[i]);
    std::sort(front.begin(), front.end());
    fronts.push_back(std::move(front));
    std::sort(next.begin(), next.end());
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(std::span<const Trial> trials,
                                      const std::vector<std::size_t>& front) {
  const std::size_t m = front.size();
  std::vector<double> distance(m, 0.0);
  if (m <= 2) {
    std::fill(distance.begin(), distance.end(), kInf);
    return distance;
  }
  const std::size_t objectives = trials[front[0]].objectives.size();
  std::vector<std::size_t> order(m);
  for (std::size_t k = 0; k < objectives; ++k) {
    std::iota(order.begin(), order.end(), 0);
    auto obj = [&](std::size_t i) { return trials[front[i]].objectives[k]; };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return obj(x) < obj(y); });
    const double span = obj(order.back()) - obj(order.front());
    distance[order.front()] = kInf;
    distance[order.back()] = kInf;
    if (!(span > 0.0)) continue;
    for (std::size_t i = 1; i + 1 < m; ++i) {
      distance[order[i]] += (obj(order[i + 1]) - obj(order[i - 1])) / span;
    }
  }
  return distance;
}

bool all_objectives_identical(const std::vector<const Trial*>& complete) {
  for (const Trial* t : complete) {
    if (t->objectives != complete.front()->objectives) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::kComplete: return "complete";
    case TrialStatus::kFailed: return "failed";
    case TrialStatus::kPruned: return "pruned";
  }
  return "?";
}

bool dominates(std::span<const double> a, std::span<const double> b) {
  bool strictly = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strictly = true;
  }
  return strictly;
}

Params sample_uniform(const SearchSpace& space, Rng& rng) {
  Params p;
  for (const auto& d : space.dimensions()) {
    if (!space.is_active(d, p)) continue;
    switch (d.kind) {
      case DimensionKind::kCategorical:
        p[d.name] = d.choices[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(d.choices.size()) - 1))];
        break;
      case DimensionKind::kUniform: p[d.name] = rng.uniform(d.low, d.high); break;
      case DimensionKind::kLogUniform:
        p[d.name] = std::clamp(std::exp(rng.uniform(std::log(d.low), std::log(d.high))), d.low,
                               d.high);
        break;
      case DimensionKind::kIntUniform:
        p[d.name] = rng.uniform_int(static_cast<std::int64_t>(d.low),
                                    static_cast<std::int64_t>(d.high));
        break;
    }
  }
  return p;
}

std::size_t good_set_size(double gamma, std::size_t count) {
  const auto n = static_cast<std::size_t>(std::floor(gamma * static_cast<double>(count) + 1e-9));
  return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(count, 1));
}

SplitResult nondominated_split(std::span<const Trial> trials, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorKind::kConfig, "gamma must lie in (0, 1)");
  }
  std::vector<std::size_t> complete;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (trials[i].status == TrialStatus::kComplete) complete.push_back(i);
  }
  SplitResult out;
  if (complete.empty()) return out;
  const std::size_t target = good_set_size(gamma, complete.size());

  for (const auto& front : pareto_fronts(trials, complete)) {
    const std::size_t room = target - out.good.size();
    if (room == 0) {
      out.bad.insert(out.bad.end(), front.begin(), front.end());
      continue;
    }
    if (front.size() <= room) {
      out.good.insert(out.good.end(), front.begin(), front.end());
      continue;
    }
    const auto distance = crowding_distance(trials, front);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return distance[x] > distance[y]; });
    for (std::size_t i = 0; i < order.size(); ++i) {
      const std::size_t id = front[order[i]];
      if (i < room) {
        out.good.push_back(id);
        out.tie_break.push_back(id);
      } else {
        out.bad.push_back(id);
      }
    }
  }
  std::sort(out.good.begin(), out.good.end());
  std::sort(out.bad.begin(), out.bad.end());
  std::sort(out.tie_break.begin(), out.tie_break.end());
  return out;
}

Params suggest(StudyState& state, const SearchSpace& space, std::span<const Params> pending) {
  if (state.history.size() >= state.budget.max_trials) {
    throw Error(ErrorKind::kBudget, "study has used its budget of " +
                                        std::to_string(state.budget.max_trials) + " trials");
  }
  std::vector<const Trial*> complete;
  for (const auto& t : state.history) {
    if (t.status == TrialStatus::kComplete) complete.push_back(&t);
  }
  if (state.history.size() < state.tpe.n_startup || complete.size() < 2 ||
      all_objectives_identical(complete)) {
    return sample_uniform(space, state.rng);
  }

  const SplitResult split = nondominated_split(state.history, state.tpe.gamma);
  std::vector<const Trial*> good, bad;
  for (std::size_t i : split.good) good.push_back(&state.history[i]);
  for (std::size_t i : split.bad) bad.push_back(&state.history[i]);
  const JointParzen below(space, good, state.tpe.prior_weight);
  const JointParzen above(space, bad, state.tpe.prior_weight);

  // A configuration already evaluated (or in flight) is only chosen when every
  // candidate is one; otherwise the sampler stalls re-evaluating its incumbent.
  auto seen = [&](const Params& p) {
    return std::any_of(state.history.begin(), state.history.end(),
                       [&](const Trial& t) { return t.params == p; }) ||
           std::find(pending.begin(), pending.end(), p) != pending.end();
  };
  Params best, best_fresh;
  double best_score = -kInf, best_fresh_score = -kInf;
  for (std::size_t c = 0; c < std::max<std::size_t>(state.tpe.n_candidates, 1); ++c) {
    Params candidate = below.sample(state.rng);
    const double score = below.log_density(candidate) - above.log_density(candidate);
    if (score > best_fresh_score && !seen(candidate)) {
      best_fresh_score = score;
      best_fresh = candidate;
    }
    if (score > best_score) {
      best_score = score;
      best = std::move(candidate);
    }
  }
  return best_fresh_score > -kInf ? best_fresh : best;
}

StudyState run_study(const ObjectiveFn& objective, const SearchSpace& space, StudyBudget budget,
                     std::uint64_t seed, TpeConfig tpe) {
  StudyState state(seed, budget, tpe);
  const std::size_t in_flight = std::max<std::size_t>(budget.max_in_flight, 1);

  auto evaluate = [&](Trial& trial) {
    try {
      TrialOutcome outcome = objective(trial.params, trial);
      const bool finite = std::all_of(outcome.objectives.begin(), outcome.objectives.end(),
                                      [](double x) { return std::isfinite(x); });
      if (outcome.failed || !finite) {
        trial.status = TrialStatus::kFailed;
        trial.objectives.clear();
      } else {
        trial.objectives = std::move(outcome.objectives);
      }
    } catch (const std::exception&) {
      trial.status = TrialStatus::kFailed;
      trial.objectives.clear();
    }
  };

  while (state.history.size() < budget.max_trials) {
    const std::size_t batch = std::min(in_flight, budget.max_trials - state.history.size());
    std::vector<Trial> pending(batch);
    std::vector<Params> in_flight_params;
    for (std::size_t i = 0; i < batch; ++i) {
      pending[i].index = state.history.size() + i;
      pending[i].seed = static_cast<std::int64_t>(seed);
      pending[i].params = suggest(state, space, in_flight_params);
      in_flight_params.push_back(pending[i].params);
    }
    if (batch == 1) {
      evaluate(pending[0]);
    } else {
      std::vector<std::thread> workers;
      for (auto& t : pending) workers.emplace_back([&evaluate, &t] { evaluate(t); });
      for (auto& w : workers) w.join();
    }
    for (auto& t : pending) state.history.push_back(std::move(t));
  }
  return state;
}

Params select_best(const StudyState& state, std::size_t objective_index) {
  const Trial* best = nullptr;
  for (const auto& t : state.history) {
    if (t.status != TrialStatus::kComplete || objective_index >= t.objectives.size()) continue;
    if (!best || t.objectives[objective_index] > best->objectives[objective_index]) best = &t;
  }
  if (!best) throw Error(ErrorKind::kSelection, "study has no complete trial to select from");
  return best->params;
}

void export_history(const StudyState& state, std::ostream& out) {
  for (const auto& t : state.history) {
    nlohmann::json j;
    j["index"] = t.index;
    j["status"] = std::string(to_string(t.status));
    j["seed"] = t.seed;
    j["params"] = to_json(t.params);
    j["objectives"] = t.objectives;
    out << j.dump() << '\n';
  }
}

}  // namespace commbench
