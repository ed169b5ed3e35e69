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

#include "commbench/store.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "commbench/error.hpp"
#include "commbench/text.hpp"

namespace commbench {
namespace {

constexpr std::string_view kMagic = "commbench-cube";

std::string cell_text(const Cell& c) {
  return c.is_ok() ? format_double(c.value) : "FAILED:" + std::string(to_string(*c.failure));
}

std::optional<Cell> parse_cell(std::string_view s) {
  if (s.substr(0, 7) == "FAILED:") {
    const auto r = parse_failure_reason(s.substr(7));
    if (!r) return std::nullopt;
    return Cell::failed(*r);
  }
  const auto v = parse_number<double>(s);
  if (!v) return std::nullopt;
  return Cell::ok(*v);
}

bool has_line_break(std::string_view s) { return s.find_first_of("\r\n") != std::string_view::npos; }

/// Line-oriented reader that remembers where each line started.
class Lines {
 public:
  Lines(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  bool at_end() const { return pos_ >= text_.size(); }

  std::string_view next(std::string_view what) {
    line_start_ = pos_;
    ++line_no_;
    if (at_end()) fail("unexpected end of file, expected " + std::string(what));
    const auto nl = text_.find('\n', pos_);
    if (nl == std::string_view::npos) fail("unexpected end of file inside a line, expected " + std::string(what));
    const auto line = text_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    return line;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::kParse, source_ + ": byte " + std::to_string(line_start_) + " (line " +
                                       std::to_string(line_no_) + "): " + what);
  }

 private:
  std::string_view text_;
  std::string source_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  std::size_t line_no_ = 0;
};

/// Splits "key rest" at the first space.
std::pair<std::string_view, std::string_view> key_rest(std::string_view line) {
  const auto sp = line.find(' ');
  if (sp == std::string_view::npos) return {line, {}};
  return {line.substr(0, sp), line.substr(sp + 1)};
}

std::vector<std::string> csv_fields(std::string_view line, const std::function<void(const std::string&)>& fail) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false, was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (c == ',') {
      out.push_back(was_quoted ? cur : std::string(trim(cur)));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) fail("unterminated quote");
  out.push_back(was_quoted ? cur : std::string(trim(cur)));
  return out;
}

}  // namespace

std::string serialize_cube(const StoredCube& stored) {
  const ResultsCube& cube = stored.cube;
  std::ostringstream out;
  out << kMagic << ' ' << kCubeFormatVersion << '\n';
  out << "fingerprint " << (stored.fingerprint.empty() ? "-" : stored.fingerprint) << '\n';
  if (stored.created) out << "created " << *stored.created << '\n';
  for (const auto& a : cube.algorithms()) {
    if (a.empty() || has_line_break(a)) throw Error(ErrorKind::kValidation, "algorithm name cannot be stored: '" + a + "'");
    out << "algorithm " << a << '\n';
  }
  for (auto s : cube.seeds()) out << "seed " << s << '\n';
  for (const auto& t : cube.tests()) {
    if (t.dataset.empty() || has_line_break(t.dataset)) {
      throw Error(ErrorKind::kValidation, "dataset name cannot be stored: '" + t.dataset + "'");
    }
    out << "test " << to_string(t.metric) << ' ' << t.dataset << '\n';
  }
  std::size_t set = 0;
  std::ostringstream cells;
  for (std::size_t a = 0; a < cube.algorithms().size(); ++a)
    for (std::size_t s = 0; s < cube.seeds().size(); ++s)
      for (std::size_t t = 0; t < cube.tests().size(); ++t) {
        if (!cube.has(a, s, t)) continue;
        ++set;
        cells << a << ' ' << s << ' ' << t << ' ' << cell_text(cube.at(a, s, t)) << '\n';
      }
  out << "cells " << set << '\n' << cells.str() << "end\n";
  return out.str();
}

StoredCube parse_cube(std::string_view text, const std::string& source) {
  Lines in(text, source);
  StoredCube stored;

  {
    const auto [magic, version] = key_rest(in.next("header"));
    if (magic != kMagic) in.fail("not a cube file (missing '" + std::string(kMagic) + "' header)");
    const auto v = parse_number<int>(version);
    if (!v) in.fail("bad format version '" + std::string(version) + "'");
    if (*v != kCubeFormatVersion) {
      throw Error(ErrorKind::kMigration, source + ": cube format version " + std::to_string(*v) +
                                             " cannot be read by this version-" +
                                             std::to_string(kCubeFormatVersion) +
                                             " reader and no migration exists; re-run to regenerate it");
    }
    stored.format_version = *v;
  }

  std::vector<std::string> algorithms;
  std::vector<std::int64_t> seeds;
  std::vector<TestPoint> tests;
  std::optional<std::size_t> cell_total;
  bool have_fingerprint = false;
  while (!cell_total) {
    const auto line = in.next("header field or 'cells'");
    const auto [key, rest] = key_rest(line);
    if (key == "fingerprint") {
      if (have_fingerprint) in.fail("duplicate fingerprint");
      have_fingerprint = true;
      if (rest != "-") stored.fingerprint = std::string(rest);
    } else if (key == "created") {
      const auto c = parse_number<std::int64_t>(rest);
      if (!c || stored.created) in.fail("bad or duplicate 'created'");
      stored.created = c;
    } else if (key == "algorithm") {
      if (rest.empty()) in.fail("empty algorithm name");
      if (std::find(algorithms.begin(), algorithms.end(), rest) != algorithms.end()) {
        in.fail("duplicate algorithm '" + std::string(rest) + "'");
      }
      algorithms.emplace_back(rest);
    } else if (key == "seed") {
      const auto s = parse_number<std::int64_t>(rest);
      if (!s) in.fail("bad seed '" + std::string(rest) + "'");
      if (std::find(seeds.begin(), seeds.end(), *s) != seeds.end()) in.fail("duplicate seed");
      seeds.push_back(*s);
    } else if (key == "test") {
      const auto [metric, dataset] = key_rest(rest);
      const auto m = parse_metric(metric);
      if (!m || dataset.empty()) in.fail("bad test '" + std::string(rest) + "'");
      TestPoint t{std::string(dataset), *m};
      if (std::find(tests.begin(), tests.end(), t) != tests.end()) in.fail("duplicate test");
      tests.push_back(std::move(t));
    } else if (key == "cells") {
      cell_total = parse_number<std::size_t>(rest);
      if (!cell_total) in.fail("bad cell count");
    } else {
      in.fail("unknown field '" + std::string(key) + "'");
    }
  }
  if (!have_fingerprint) in.fail("missing fingerprint");

  stored.cube = ResultsCube(algorithms, seeds, tests);
  for (std::size_t i = 0; i < *cell_total; ++i) {
    const auto line = in.next("cell");
    const auto f = split_fields(line);
    if (f.size() != 4) in.fail("cell line needs 4 fields");
    const auto a = parse_number<std::size_t>(f[0]);
    const auto s = parse_number<std::size_t>(f[1]);
    const auto t = parse_number<std::size_t>(f[2]);
    if (!a || !s || !t || *a >= algorithms.size() || *s >= seeds.size() || *t >= tests.size()) {
      in.fail("cell index out of range");
    }
    const auto cell = parse_cell(f[3]);
    if (!cell) in.fail("bad cell value '" + std::string(f[3]) + "'");
    if (stored.cube.has(*a, *s, *t)) in.fail("duplicate cell");
    stored.cube.set(*a, *s, *t, *cell);
  }
  if (in.next("'end'") != "end") in.fail("expected 'end'");
  if (!in.at_end()) {
    in.next("nothing");
    in.fail("data after 'end'");
  }
  return stored;
}

void save_cube(const StoredCube& stored, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_cube(stored));
}

StoredCube load_cube(const std::filesystem::path& path) {
  return parse_cube(read_file(path), path.string());
}

StoredCube merge_cubes(const StoredCube& a, const StoredCube& b) {
  if (a.fingerprint != b.fingerprint) {
    throw Error(ErrorKind::kValidation, "cannot merge cubes with different config fingerprints (" +
                                            (a.fingerprint.empty() ? "-" : a.fingerprint) + " vs " +
                                            (b.fingerprint.empty() ? "-" : b.fingerprint) + ")");
  }
  const ResultsCube& x = a.cube;
  const ResultsCube& y = b.cube;
  if (x.algorithms() != y.algorithms() || x.seeds() != y.seeds() || x.tests() != y.tests()) {
    throw Error(ErrorKind::kAlignment, "cannot merge cubes with different axes");
  }
  StoredCube out = a;
  for (std::size_t i = 0; i < x.algorithms().size(); ++i)
    for (std::size_t s = 0; s < x.seeds().size(); ++s)
      for (std::size_t t = 0; t < x.tests().size(); ++t) {
        if (!y.has(i, s, t)) continue;
        if (!x.has(i, s, t)) {
          out.cube.set(i, s, t, y.at(i, s, t));
        } else if (!(x.at(i, s, t) == y.at(i, s, t))) {
          throw Error(ErrorKind::kValidation, "merge conflict at (" + x.algorithms()[i] + ", " +
                                                  std::to_string(x.seeds()[s]) + ", " +
                                                  to_string(x.tests()[t]) + ")");
        }
      }
  return out;
}

ResultsCube parse_results_csv(std::string_view text, const std::string& source) {
  struct Row {
    std::size_t a, s, t;
    Cell cell;
  };
  std::vector<std::string> algorithms;
  std::vector<std::int64_t> seeds;
  std::vector<TestPoint> tests;
  std::vector<Row> rows;
  auto index_of = [](auto& axis, const auto& v) {
    const auto it = std::find(axis.begin(), axis.end(), v);
    if (it != axis.end()) return static_cast<std::size_t>(it - axis.begin());
    axis.push_back(v);
    return axis.size() - 1;
  };

  std::size_t pos = 0, line_no = 0;
  bool header = false;
  while (pos < text.size()) {
    const std::size_t start = pos;
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto fail = [&](const std::string& what) {
      throw Error(ErrorKind::kParse, source + ": byte " + std::to_string(start) + " (line " +
                                         std::to_string(line_no) + "): " + what);
    };
    if (trim(line).empty()) continue;
    const auto f = csv_fields(line, fail);
    if (!header) {
      if (f != std::vector<std::string>{"algorithm", "seed", "dataset", "metric", "value"}) {
        fail("expected header 'algorithm,seed,dataset,metric,value'");
      }
      header = true;
      continue;
    }
    if (f.size() != 5) fail("expected 5 fields, found " + std::to_string(f.size()));
    if (f[0].empty() || f[2].empty()) fail("empty algorithm or dataset");
    const auto seed = parse_number<std::int64_t>(f[1]);
    if (!seed) fail("bad seed '" + f[1] + "'");
    const auto metric = parse_metric(f[3]);
    if (!metric) fail("unknown metric '" + f[3] + "'");
    const auto cell = parse_cell(f[4]);
    if (!cell) fail("bad value '" + f[4] + "'");
    rows.push_back({index_of(algorithms, f[0]), index_of(seeds, *seed),
                    index_of(tests, TestPoint{f[2], *metric}), *cell});
  }
  if (!header) throw Error(ErrorKind::kParse, source + ": byte 0 (line 1): missing header");
  ResultsCube cube(algorithms, seeds, tests);
  for (const auto& r : rows) {
    if (cube.has(r.a, r.s, r.t)) {
      throw Error(ErrorKind::kParse, source + ": duplicate row for (" + algorithms[r.a] + ", " +
                                         std::to_string(seeds[r.s]) + ", " + to_string(tests[r.t]) + ")");
    }
    cube.set(r.a, r.s, r.t, r.cell);
  }
  return cube;
}

ResultsCube read_results_csv(const std::filesystem::path& path) {
  return parse_results_csv(read_file(path), path.string());
}

void write_results_csv(const ResultsCube& cube, std::ostream& out) {
  out << "algorithm,seed,dataset,metric,value\n";
  for (std::size_t a = 0; a < cube.algorithms().size(); ++a)
    for (std::size_t s = 0; s < cube.seeds().size(); ++s)
      for (std::size_t t = 0; t < cube.tests().size(); ++t) {
        if (!cube.has(a, s, t)) continue;
        out << csv_quote(cube.algorithms()[a]) << ',' << cube.seeds()[s] << ','
            << csv_quote(cube.tests()[t].dataset) << ',' << to_string(cube.tests()[t].metric) << ','
            << cell_text(cube.at(a, s, t)) << '\n';
      }
}

}  // namespace commbench
