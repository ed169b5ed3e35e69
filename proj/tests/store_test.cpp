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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "commbench/error.hpp"
#include "commbench/report.hpp"
#include "commbench/store.hpp"
#include "commbench/text.hpp"
#include "support/fixtures.hpp"

namespace commbench {
namespace {

ResultsCube random_cube(std::mt19937_64& gen, bool sparse = false) {
  std::uniform_int_distribution<int> count(1, 5);
  std::vector<std::string> algs;
  for (int i = 0, n = count(gen); i < n; ++i) algs.push_back("alg " + std::to_string(i));
  std::vector<std::int64_t> seeds;
  for (int i = 0, n = count(gen); i < n; ++i) seeds.push_back(static_cast<std::int64_t>(gen() % 100000) * 10 + i);
  std::vector<TestPoint> tests;
  for (int i = 0, n = count(gen); i < n; ++i) tests.push_back({"data-" + std::to_string(i), kAllMetrics[gen() % 4]});
  ResultsCube cube(algs, seeds, tests);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  for (std::size_t a = 0; a < algs.size(); ++a)
    for (std::size_t s = 0; s < seeds.size(); ++s)
      for (std::size_t t = 0; t < tests.size(); ++t) {
        if (sparse && gen() % 3 == 0) continue;
        if (gen() % 7 == 0) {
          cube.set(a, s, t, Cell::failed(static_cast<FailureReason>(gen() % 4)));
        } else {
          cube.set(a, s, t, Cell::ok(value(gen) * std::pow(10.0, static_cast<double>(gen() % 20) - 10.0)));
        }
      }
  return cube;
}

StoredCube sample() {
  ResultsCube cube({"kmeans", "lp"}, {42, 24}, {{"karate", Metric::kNmi}, {"karate", Metric::kConductance}});
  cube.set(0, 0, 0, Cell::ok(0.5));
  cube.set(0, 0, 1, Cell::ok(0.1));
  cube.set(0, 1, 0, Cell::ok(0.25));
  cube.set(0, 1, 1, Cell::ok(1.0 / 3.0));
  cube.set(1, 0, 0, Cell::failed(FailureReason::kOom));
  cube.set(1, 0, 1, Cell::ok(0.0));
  cube.set(1, 1, 0, Cell::ok(-0.0625));
  cube.set(1, 1, 1, Cell::failed(FailureReason::kTimeout));
  return {kCubeFormatVersion, std::string(64, 'a'), std::nullopt, cube};
}


ErrorKind parse_error_kind(const std::string& text, std::string* message = nullptr) {
  try {
    parse_cube(text, "c");
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ErrorKind::kIo;
}

TEST(CubeFormat, ExactLayout) {
  EXPECT_EQ(serialize_cube(sample()),
            "commbench-cube 1\n"
            "fingerprint " + std::string(64, 'a') + "\n"
            "algorithm kmeans\n"
            "algorithm lp\n"
            "seed 42\n"
            "seed 24\n"
            "test nmi karate\n"
            "test conductance karate\n"
            "cells 8\n"
            "0 0 0 0.5\n"
            "0 0 1 0.1\n"
            "0 1 0 0.25\n"
            "0 1 1 0.3333333333333333\n"
            "1 0 0 FAILED:oom\n"
            "1 0 1 0\n"
            "1 1 0 -0.0625\n"
            "1 1 1 FAILED:timeout\n"
            "end\n");
}

TEST(CubeFormat, RoundTripsRandomCubes) {
  std::mt19937_64 gen(11);
  for (int i = 0; i < 200; ++i) {
    StoredCube s;
    s.cube = random_cube(gen, i % 2 == 1);
    if (i % 3 == 0) s.created = 1700000000 + i;
    if (i % 4 == 0) s.fingerprint = "f" + std::to_string(i);
    const std::string text = serialize_cube(s);
    const StoredCube back = parse_cube(text);
    ASSERT_EQ(back, s) << text;
    EXPECT_EQ(serialize_cube(back), text);
  }
}

TEST(CubeFormat, SaveLoadIsAtomicAndIdentical) {
  const auto dir = testing::temp_dir("store");
  const auto path = dir / "run.cube";
  save_cube(sample(), path);
  EXPECT_EQ(load_cube(path), sample());
  for (const auto& e : std::filesystem::directory_iterator(dir)) EXPECT_EQ(e.path(), path);
  std::filesystem::remove_all(dir);
}

TEST(CubeFormat, TruncationNamesTheByteOffset) {
  const std::string full = serialize_cube(sample());
  for (std::size_t cut : {std::size_t{5}, full.size() / 2, full.size() - 4, full.size() - 1}) {
    std::string msg;
    EXPECT_EQ(parse_error_kind(full.substr(0, cut), &msg), ErrorKind::kParse);
    EXPECT_NE(msg.find("byte "), std::string::npos) << msg;
  }
  // The offset is where the damaged line starts.
  const std::size_t end_line = full.size() - 4;
  std::string msg;
  parse_error_kind(full.substr(0, full.size() - 1), &msg);
  EXPECT_NE(msg.find("c: byte " + std::to_string(end_line) + " "), std::string::npos) << msg;
}

TEST(CubeFormat, CorruptionIsAParseError) {
  const std::string full = serialize_cube(sample());
  auto replaced = [&](const std::string& from, const std::string& to) {
    std::string s = full;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  EXPECT_EQ(parse_error_kind(replaced("0 1 0 0.25", "0 1 0 zero")), ErrorKind::kParse);
  EXPECT_EQ(parse_error_kind(replaced("0 1 0 0.25", "0 9 0 0.25")), ErrorKind::kParse);
  EXPECT_EQ(parse_error_kind(replaced("0 1 0 0.25", "0 0 0 0.25")), ErrorKind::kParse);
  EXPECT_EQ(parse_error_kind(replaced("FAILED:oom", "FAILED:sad")), ErrorKind::kParse);
  EXPECT_EQ(parse_error_kind(replaced("seed 24", "seed 42")), ErrorKind::kParse);
  EXPECT_EQ(parse_error_kind(replaced("test nmi", "test accuracy")), ErrorKind::kParse);
  EXPECT_EQ(parse_error_kind(replaced("cells 8", "cells 9")), ErrorKind::kParse);
  EXPECT_EQ(parse_error_kind(replaced("algorithm lp\n", "colour lp\n")), ErrorKind::kParse);
  EXPECT_EQ(parse_error_kind(full + "extra\n"), ErrorKind::kParse);
  EXPECT_EQ(parse_error_kind("hello\n"), ErrorKind::kParse);
  EXPECT_EQ(parse_error_kind(""), ErrorKind::kParse);
}

TEST(CubeFormat, OtherVersionNeedsMigration) {
  std::string text = serialize_cube(sample());
  text.replace(0, 16, "commbench-cube 0");
  std::string msg;
  EXPECT_EQ(parse_error_kind(text, &msg), ErrorKind::kMigration);
  EXPECT_NE(msg.find("version 0"), std::string::npos);
  text.replace(0, 16, "commbench-cube 2");
  EXPECT_EQ(parse_error_kind(text), ErrorKind::kMigration);
}

TEST(CubeFormat, MissingFileIsLoadError) {
  try {
    load_cube("/nonexistent/x.cube");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLoad);
  }
}

TEST(CubeFormat, UnstorableNamesAreRejected) {
  StoredCube s;
  s.cube = ResultsCube({"bad\nname"}, {1}, {{"d", Metric::kNmi}});
  EXPECT_THROW(serialize_cube(s), Error);
}

TEST(MergeCubes, FillsGapsAndChecksFingerprints) {
  StoredCube full = sample();
  StoredCube left = full, right = full;
  left.cube = ResultsCube(full.cube.algorithms(), full.cube.seeds(), full.cube.tests());
  right.cube = left.cube;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t t = 0; t < 2; ++t) (a == 0 ? left : right).cube.set(a, s, t, full.cube.at(a, s, t));
  EXPECT_EQ(merge_cubes(left, right), full);
  EXPECT_EQ(merge_cubes(full, right), full);

  StoredCube other = right;
  other.fingerprint = std::string(64, 'b');
  try {
    merge_cubes(left, other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
  }
  StoredCube clash = full;
  clash.cube.set(0, 0, 0, Cell::ok(0.75));
  EXPECT_THROW(merge_cubes(full, clash), Error);
  StoredCube skew = full;
  skew.cube = ResultsCube({"kmeans"}, {42, 24}, full.cube.tests());
  try {
    merge_cubes(full, skew);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kAlignment);
  }
}

TEST(ResultsCsv, ParsesRowsInFirstAppearanceOrder) {
  const auto cube = parse_results_csv(
      "algorithm,seed,dataset,metric,value\n"
      "b,7,d1,nmi,0.5\n"
      "a,7,d1,nmi,0.25\n"
      "\"a, the second\",7,d1,nmi,FAILED:oom\r\n"
      "b,3,d1,nmi,1e-3\n"
      "\n");
  EXPECT_EQ(cube.algorithms(), (std::vector<std::string>{"b", "a", "a, the second"}));
  EXPECT_EQ(cube.seeds(), (std::vector<std::int64_t>{7, 3}));
  ASSERT_EQ(cube.tests().size(), 1u);
  EXPECT_EQ(cube.at(0, 1, 0), Cell::ok(0.001));
  EXPECT_EQ(cube.at(2, 0, 0), Cell::failed(FailureReason::kOom));
  EXPECT_FALSE(cube.has(1, 1, 0));
}

TEST(ResultsCsv, RoundTripsThroughWriter) {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 50; ++i) {
    const ResultsCube cube = random_cube(gen);
    std::ostringstream out;
    write_results_csv(cube, out);
    EXPECT_EQ(parse_results_csv(out.str()), cube);
  }
}

TEST(ResultsCsv, RejectsMalformedInput) {
  auto kind = [](const std::string& text) {
    try {
      parse_results_csv(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kIo;
  };
  const std::string h = "algorithm,seed,dataset,metric,value\n";
  EXPECT_EQ(kind(""), ErrorKind::kParse);
  EXPECT_EQ(kind("alg,seed,dataset,metric,value\n"), ErrorKind::kParse);
  EXPECT_EQ(kind(h + "a,1,d,nmi\n"), ErrorKind::kParse);
  EXPECT_EQ(kind(h + "a,x,d,nmi,1\n"), ErrorKind::kParse);
  EXPECT_EQ(kind(h + "a,1,d,accuracy,1\n"), ErrorKind::kParse);
  EXPECT_EQ(kind(h + "a,1,d,nmi,high\n"), ErrorKind::kParse);
  EXPECT_EQ(kind(h + "a,1,d,nmi,1\na,1,d,nmi,2\n"), ErrorKind::kParse);
  EXPECT_EQ(kind(h + "\"a,1,d,nmi,1\n"), ErrorKind::kParse);
}

TEST(Report, ConstantSeriesHasZeroSpread) {
  ResultsCube cube({"solo"}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {{"d", Metric::kNmi}});
  for (std::size_t s = 0; s < 10; ++s) cube.set(0, s, 0, Cell::ok(0.5));
  const auto c = summarize(cube, 0, 0);
  EXPECT_EQ(*c.mean, 0.5);
  EXPECT_EQ(c.std, 0.0);
  const auto dir = testing::temp_dir("report");
  const auto files = emit_report(cube, ConcordanceReport{}, std::nullopt, dir);
  EXPECT_EQ(files.size(), 4u);
  EXPECT_NE(read_file(dir / "results.md").find("| solo | 0.500 ± 0.000 |"), std::string::npos);
  EXPECT_EQ(read_file(dir / "metrics.csv"), "algorithm,dataset,metric,mean,std,ok,failed\nsolo,d,nmi,0.5,0,10,0\n");
  std::filesystem::remove_all(dir);
}

TEST(Report, FailuresAreCountedAndExcludedFromMeans) {
  ResultsCube cube({"x", "y"}, {1, 2, 3, 4}, {{"d", Metric::kF1}});
  for (std::size_t s = 0; s < 4; ++s) {
    cube.set(0, s, 0, s < 2 ? Cell::ok(0.2 + 0.2 * static_cast<double>(s)) : Cell::failed(FailureReason::kOom));
    cube.set(1, s, 0, Cell::failed(s == 0 ? FailureReason::kTimeout : FailureReason::kCrash));
  }
  const auto c = summarize(cube, 0, 0);
  EXPECT_NEAR(*c.mean, 0.3, 1e-15);
  EXPECT_NEAR(c.std, 0.1, 1e-15);
  EXPECT_EQ(c.failed, 2u);
  const auto dir = testing::temp_dir("report");
  emit_report(cube, w_randomness_coefficient(cube), std::nullopt, dir);
  const std::string md = read_file(dir / "results.md");
  EXPECT_NE(md.find("| x | 0.300 ± 0.100 (2/4 failed: 2 oom) |"), std::string::npos) << md;
  EXPECT_NE(md.find("| y | FAILED (4/4: 1 timeout, 3 crash) |"), std::string::npos) << md;
  const std::string csv = read_file(dir / "metrics.csv");
  EXPECT_NE(csv.find("y,d,f1,,,0,4\n"), std::string::npos) << csv;
  std::filesystem::remove_all(dir);
}

TEST(Report, RegimeSummaryHasTwoColumns) {
  ResultsCube def({"p", "q"}, {1, 2}, {{"d", Metric::kNmi}, {"d", Metric::kModularity}});
  ResultsCube hpo = def;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t t = 0; t < 2; ++t) {
        def.set(a, s, t, Cell::ok(0.1 * static_cast<double>(a + 1)));
        hpo.set(a, s, t, Cell::ok(0.1 * static_cast<double>(a + 1) + (a == 0 ? 0.15 : -0.05)));
      }
  RegimeComparison cmp{framework_comparison_rank(def, hpo, "default", "hpo"), w_randomness_coefficient(def),
                       w_randomness_coefficient(hpo)};
  const auto dir = testing::temp_dir("report");
  const auto files = emit_report(hpo, cmp.hpo_w, cmp, dir);
  EXPECT_EQ(files.size(), 6u);
  EXPECT_EQ(read_file(dir / "summary.md"),
            "# Default vs HPO\n\n"
            "| | Default | HPO |\n"
            "|---|---|---|\n"
            "| W Randomness Coefficient | 0.000 | 0.000 |\n"
            "| Framework Comparison Rank | 1.500 ± 0.500 | 1.500 ± 0.500 |\n"
            "\nPer-seed Framework Comparison Rank: 1.500 ± 0.500 (Default), 1.500 ± 0.500 (HPO)\n");
  EXPECT_EQ(read_file(dir / "summary.csv"),
            "quantity,default,hpo\nw_randomness,0,0\nfcr_mean,1.5,1.5\nfcr_std,0.5,0.5\n"
            "fcr_per_seed_mean,1.5,1.5\nfcr_per_seed_std,0.5,0.5\n");
  std::filesystem::remove_all(dir);
}

TEST(Report, ErrorsOnEmptyCubeAndUnwritableDir) {
  EXPECT_THROW(emit_report(ResultsCube{}, {}, std::nullopt, "/tmp/x"), Error);
  ResultsCube cube({"a"}, {1}, {{"d", Metric::kNmi}});
  cube.set(0, 0, 0, Cell::ok(1.0));
  const auto dir = testing::temp_dir("report");
  std::ofstream(dir / "file") << "x";
  try {
    emit_report(cube, {}, std::nullopt, dir / "file" / "sub");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace commbench
