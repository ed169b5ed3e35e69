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

#include <random>
#include <set>
#include <sstream>

#include "commbench/error.hpp"
#include "commbench/hpo.hpp"
#include "support/synthetic.hpp"

namespace commbench {
namespace {

SearchSpace table_space() {
  SearchSpace s;
  s.add(Dimension::categorical(
      "learning_rate", {0.05, 0.01, 0.005, 0.001, 0.0005, 0.0001}));
  s.add(Dimension::categorical("weight_decay", {0.05, 0.005, 0.0005, 0.0}));
  s.add(Dimension::categorical("patience", {std::int64_t{25}, std::int64_t{100},
                                            std::int64_t{500}, std::int64_t{1000}}));
  return s;
}

SearchSpace conditional_space() {
  SearchSpace s;
  s.add(Dimension::categorical("encoder", {std::string("gcn"), std::string("gat")}));
  s.add(Dimension::int_uniform("heads", 1, 8).when("encoder", std::string("gat")));
  s.add(Dimension::log_uniform("dropout", 1e-3, 0.5).when("heads", std::int64_t{4}));
  s.add(Dimension::uniform("tau", 0.1, 1.0));
  return s;
}

Trial complete(std::size_t index, Params p, std::vector<double> objectives) {
  Trial t;
  t.index = index;
  t.params = std::move(p);
  t.objectives = std::move(objectives);
  return t;
}

TEST(SearchSpace, RejectsInvalidDefinitions) {
  SearchSpace s;
  s.add(Dimension::uniform("a", 0, 1));
  EXPECT_THROW(s.add(Dimension::uniform("a", 0, 1)), Error);
  EXPECT_THROW(s.add(Dimension::categorical("b", {})), Error);
  EXPECT_THROW(s.add(Dimension::uniform("c", 2, 1)), Error);
  EXPECT_THROW(s.add(Dimension::log_uniform("d", 0, 1)), Error);
  EXPECT_THROW(s.add(Dimension::uniform("e", 0, 1).when("missing", 1.0)), Error);
}

TEST(SearchSpace, JsonRoundTrip) {
  const SearchSpace s = conditional_space();
  const SearchSpace t = SearchSpace::from_json(s.to_json());
  EXPECT_EQ(s.to_json(), t.to_json());
}

TEST(Suggest, StartupSamplesRespectDomains) {
  const SearchSpace space = table_space();
  StudyState st(42, {10, 1});
  const Params p = suggest(st, space);
  std::string why;
  EXPECT_TRUE(space.contains(p, &why)) << why;
}

TEST(Suggest, ConditionalityRespectedOnRandomHistories) {
  const SearchSpace space = conditional_space();
  std::mt19937_64 gen(1);
  for (int rep = 0; rep < 5; ++rep) {
    const StudyState st = run_study(
        [&](const Params& p, const Trial&) {
          double v = std::get<double>(p.at("tau"));
          if (p.count("heads")) v += static_cast<double>(std::get<std::int64_t>(p.at("heads")));
          return TrialOutcome{{v, -v}, false};
        },
        space, {60, 1}, gen());
    for (const auto& t : st.history) {
      std::string why;
      EXPECT_TRUE(space.contains(t.params, &why)) << why;
    }
  }
}

TEST(Suggest, FavoursCategoryThatDominatesGoodSet) {
  const SearchSpace space = table_space();
  StudyState st(7, {2000, 1});
  Rng rng(3);
  for (std::size_t i = 0; i < 20; ++i) {
    Params p = sample_uniform(space, rng);
    if (i % 4 == 0) p["learning_rate"] = 0.01;
    const bool good = std::get<double>(p["learning_rate"]) == 0.01;
    st.history.push_back(complete(i, p, {good ? 1.0 + 0.01 * i : 0.01 * i}));
  }
  int hits = 0;
  const int draws = 1000;
  for (int i = 0; i < draws; ++i) {
    StudyState copy = st;
    copy.rng = Rng(static_cast<std::uint64_t>(i));
    if (std::get<double>(suggest(copy, space).at("learning_rate")) == 0.01) ++hits;
  }
  EXPECT_GT(static_cast<double>(hits) / draws, 1.0 / 6.0);
}

TEST(Suggest, IdenticalObjectivesFallBackToUniform) {
  const SearchSpace space = table_space();
  StudyState st(9, {100, 1});
  Rng rng(1);
  for (std::size_t i = 0; i < 20; ++i) {
    st.history.push_back(complete(i, sample_uniform(space, rng), {0.5, 0.5}));
  }
  const Params p = suggest(st, space);
  EXPECT_TRUE(space.contains(p));
}

TEST(Suggest, ExhaustedBudgetThrows) {
  StudyState st(1, {1, 1});
  st.history.push_back(complete(0, {}, {1.0}));
  try {
    suggest(st, table_space());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBudget);
  }
}

TEST(NondominatedSplit, Examples) {
  std::vector<Trial> single = {complete(0, {}, {3}), complete(1, {}, {1}), complete(2, {}, {2})};
  EXPECT_EQ(nondominated_split(single, 0.34).good, (std::vector<std::size_t>{0}));

  std::vector<Trial> two = {complete(0, {}, {1, 0}), complete(1, {}, {0, 1}),
                            complete(2, {}, {0, 0})};
  const SplitResult r = nondominated_split(two, 0.67);
  EXPECT_EQ(r.good, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(r.bad, (std::vector<std::size_t>{2}));
  EXPECT_TRUE(r.tie_break.empty());
}

TEST(NondominatedSplit, GammaOutsideUnitIntervalIsConfigError) {
  std::vector<Trial> t = {complete(0, {}, {1})};
  for (double g : {0.0, 1.0, -0.5}) {
    try {
      nondominated_split(t, g);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    }
  }
}

TEST(NondominatedSplit, NoBadTrialDominatesAGoodOne) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Trial> trials;
    for (std::size_t i = 0; i < 100; ++i) {
      trials.push_back(complete(i, {}, {std::round(u(gen) * 10), std::round(u(gen) * 10)}));
    }
    const SplitResult r = nondominated_split(trials, 0.25);
    EXPECT_EQ(r.good.size(), 25u);
    EXPECT_EQ(r.good.size() + r.bad.size(), 100u);
    for (std::size_t g : r.good) {
      const bool tie_entry =
          std::find(r.tie_break.begin(), r.tie_break.end(), g) != r.tie_break.end();
      for (std::size_t b : r.bad) {
        if (dominates(trials[b].objectives, trials[g].objectives)) {
          EXPECT_TRUE(tie_entry);
        }
      }
    }
  }
}

TEST(NondominatedSplit, IgnoresFailedTrials) {
  std::vector<Trial> t = {complete(0, {}, {1}), complete(1, {}, {2})};
  t.push_back(Trial{2, {}, {}, TrialStatus::kFailed, 0});
  const SplitResult r = nondominated_split(t, 0.5);
  EXPECT_EQ(r.good, (std::vector<std::size_t>{1}));
  EXPECT_EQ(r.bad, (std::vector<std::size_t>{0}));
}

TEST(RunStudy, ZeroBudgetGivesEmptyHistory) {
  const StudyState st =
      run_study([](const Params&, const Trial&) { return TrialOutcome{{1.0}, false}; },
                table_space(), {0, 1}, 42);
  EXPECT_TRUE(st.history.empty());
}

TEST(RunStudy, DeterministicHistories) {
  auto run = [](std::size_t in_flight) {
    const StudyState st = run_study(
        [](const Params& p, const Trial&) {
          return TrialOutcome{{testing::sphere_value(p)}, false};
        },
        testing::sphere_space(), {100, in_flight}, 42);
    std::ostringstream out;
    export_history(st, out);
    return out.str();
  };
  EXPECT_EQ(run(1), run(1));
  EXPECT_EQ(run(4), run(4));
}

TEST(RunStudy, CallbackFailuresAreRecordedAndStudyContinues) {
  const StudyState st = run_study(
      [](const Params&, const Trial& t) -> TrialOutcome {
        if (t.index % 3 == 0) throw std::runtime_error("boom");
        if (t.index % 3 == 1) return {{std::nan("")}, false};
        return {{1.0}, false};
      },
      table_space(), {12, 1}, 1);
  ASSERT_EQ(st.history.size(), 12u);
  for (const auto& t : st.history) {
    EXPECT_EQ(t.status, t.index % 3 == 2 ? TrialStatus::kComplete : TrialStatus::kFailed);
  }
}

TEST(RunStudy, BeatsRandomSearchOnBandit) {
  std::vector<double> tpe, random;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    tpe.push_back(testing::tpe_best(testing::bandit_space(), testing::bandit_value, 100, rep));
    random.push_back(
        testing::random_search_best(testing::bandit_space(), testing::bandit_value, 100, rep));
  }
  EXPECT_GT(testing::median(tpe), testing::median(random));
}

TEST(RunStudy, ApproachesSphereOptimum) {
  std::vector<double> tpe, random;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    tpe.push_back(testing::tpe_best(testing::sphere_space(), testing::sphere_value, 100, rep));
    random.push_back(
        testing::random_search_best(testing::sphere_space(), testing::sphere_value, 100, rep));
  }
  EXPECT_GE(testing::median(tpe), -0.05);
  EXPECT_GE(testing::median(tpe), testing::median(random));
}

TEST(Suggest, PrefersConfigurationsNotYetEvaluatedOrInFlight) {
  const SearchSpace space = testing::bandit_space();
  StudyState st(4, {100, 4});
  Rng rng(8);
  const Params incumbent = {{"arm0", std::int64_t{0}}, {"arm1", std::int64_t{1}},
                            {"arm2", std::int64_t{2}}};
  for (std::size_t i = 0; i < 30; ++i) {
    const bool top = i % 2 == 0;
    st.history.push_back(complete(i, top ? incumbent : sample_uniform(space, rng),
                                  {top ? 1.8 : 0.1 * testing::bandit_value(incumbent)}));
  }
  std::vector<Params> pending;
  for (int i = 0; i < 4; ++i) {
    const Params p = suggest(st, space, pending);
    EXPECT_NE(p, incumbent);
    EXPECT_EQ(std::count(pending.begin(), pending.end(), p), 0);
    pending.push_back(p);
  }
}

TEST(SelectBest, Examples) {
  StudyState st(1, {10, 1});
  st.history.push_back(complete(0, {{"a", std::int64_t{1}}}, {0.4}));
  EXPECT_EQ(select_best(st, 0).at("a"), ParamValue{std::int64_t{1}});
  st.history.push_back(complete(1, {{"a", std::int64_t{2}}}, {0.9}));
  EXPECT_EQ(select_best(st, 0).at("a"), ParamValue{std::int64_t{2}});
  st.history.push_back(complete(2, {{"a", std::int64_t{3}}}, {0.9}));
  EXPECT_EQ(select_best(st, 0).at("a"), ParamValue{std::int64_t{2}});
}

TEST(SelectBest, NoCompleteTrialIsSelectionError) {
  StudyState st(1, {10, 1});
  st.history.push_back(Trial{0, {}, {}, TrialStatus::kFailed, 0});
  try {
    select_best(st, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSelection);
  }
}

}  // namespace
}  // namespace commbench
