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
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "commbench/random.hpp"
#include "commbench/search_space.hpp"

namespace commbench {

enum class TrialStatus { kComplete, kFailed, kPruned };

std::string_view to_string(TrialStatus s);

struct Trial {
  std::size_t index = 0;
  Params params;
  /// Orientation-normalized: every objective is maximized.
  std::vector<double> objectives;
  TrialStatus status = TrialStatus::kComplete;
  std::int64_t seed = 0;

  friend bool operator==(const Trial&, const Trial&) = default;
};

struct TpeConfig {
  double gamma = 0.25;
  std::size_t n_startup = 10;
  std::size_t n_candidates = 24;
  double prior_weight = 1.0;
};

struct StudyBudget {
  std::size_t max_trials = 300;
  /// Trials evaluated concurrently. Suggestions for a batch are drawn in
  /// order from the history as it stood before the batch, and results are
  /// appended in trial-index order, so the history does not depend on thread
  /// timing.
  std::size_t max_in_flight = 1;
};

/// Coordinator-owned study. The history is append-only; suggestions depend
/// only on the history and the generator state.
struct StudyState {
  StudyState(std::uint64_t seed, StudyBudget budget, TpeConfig tpe = {})
      : seed(seed), rng(mix_seed(seed, "tpe")), budget(budget), tpe(tpe) {}

  std::uint64_t seed;
  Rng rng;
  StudyBudget budget;
  TpeConfig tpe;
  std::vector<Trial> history;
};

/// Uniform sample honouring conditionality.
Params sample_uniform(const SearchSpace& space, Rng& rng);

/// Next parameters to try. Startup and degenerate histories fall back to
/// uniform sampling; otherwise the candidate maximizing l(x)/g(x) among
/// `n_candidates` draws from l is returned, preferring candidates that are not
/// already in the history or in `pending`. Throws kBudget when the study has
/// already used its trial budget.
Params suggest(StudyState& state, const SearchSpace& space, std::span<const Params> pending = {});

struct SplitResult {
  std::vector<std::size_t> good;  // indices into the input span
  std::vector<std::size_t> bad;
  /// Good entries admitted from the last, partially taken front.
  std::vector<std::size_t> tie_break;
};

/// Size of the good set for `count` trials: floor(gamma * count), at least 1.
std::size_t good_set_size(double gamma, std::size_t count);

/// Peels Pareto fronts (objectives maximized) into the good set until it
/// holds good_set_size trials; the last front is cut by crowding distance.
/// Non-complete trials are ignored. Throws kConfig unless 0 < gamma < 1.
SplitResult nondominated_split(std::span<const Trial> trials, double gamma);

/// True when `a` is at least as good as `b` everywhere and better somewhere.
bool dominates(std::span<const double> a, std::span<const double> b);

struct TrialOutcome {
  std::vector<double> objectives;
  bool failed = false;
};

using ObjectiveFn = std::function<TrialOutcome(const Params&, const Trial&)>;

/// Runs suggestions until the budget is used. A callback that throws or
/// reports failure (or returns non-finite objectives) yields a failed trial.
StudyState run_study(const ObjectiveFn& objective, const SearchSpace& space, StudyBudget budget,
                     std::uint64_t seed, TpeConfig tpe = {});

/// Params of the complete trial with the largest objective `index`; ties go
/// to the earliest trial. Throws kSelection when no trial is complete.
Params select_best(const StudyState& state, std::size_t objective_index);

/// One JSON object per line and per trial.
void export_history(const StudyState& state, std::ostream& out);

}  // namespace commbench
