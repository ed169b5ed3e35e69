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

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "commbench/error.hpp"
#include "commbench/graph.hpp"
#include "commbench/text.hpp"

namespace commbench {
namespace {

namespace fs = std::filesystem;

constexpr char kFeatureMagic[8] = {'C', 'B', 'F', 'E', 'A', 'T', '0', '1'};

std::ifstream open_input(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorKind::kLoad, "cannot open " + path.string());
  return in;
}

std::size_t meta_size(const std::map<std::string, std::string>& meta, const std::string& key,
                      const fs::path& path, bool required) {
  auto it = meta.find(key);
  if (it == meta.end()) {
    if (required) throw Error(ErrorKind::kLoad, path.string() + ": missing key '" + key + "'");
    return 0;
  }
  auto value = parse_number<std::size_t>(it->second);
  if (!value) {
    throw Error(ErrorKind::kLoad,
                path.string() + ": key '" + key + "' is not a count: " + it->second);
  }
  return *value;
}

std::vector<Edge> read_edges(const fs::path& path, std::size_t n) {
  auto in = open_input(path);
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(strip_comment(line));
    if (fields.empty()) continue;
    auto u = parse_number<std::uint64_t>(fields[0]);
    auto v = fields.size() > 1 ? parse_number<std::uint64_t>(fields[1]) : std::nullopt;
    std::optional<double> w = 1.0;
    if (fields.size() > 2) w = parse_number<double>(fields[2]);
    if (!u || !v || !w || fields.size() > 3) {
      throw Error(ErrorKind::kLoad, path.string() + ":" + std::to_string(line_no) +
                                        ": expected 'u v [w]', got '" + line + "'");
    }
    if (*u >= n || *v >= n) {
      throw Error(ErrorKind::kValidation, path.string() + ":" + std::to_string(line_no) +
                                              ": node id outside [0, " + std::to_string(n) + ")");
    }
    edges.push_back({static_cast<NodeId>(*u), static_cast<NodeId>(*v), *w});
  }
  return edges;
}

FeatureMatrix read_text_features(const fs::path& path) {
  auto in = open_input(path);
  std::vector<double> values;
  std::size_t rows = 0;
  std::optional<std::size_t> cols;
  std::string line;
  while (std::getline(in, line)) {
    const auto fields = split_fields(strip_comment(line));
    if (fields.empty()) continue;
    if (cols && fields.size() != *cols) {
      throw Error(ErrorKind::kShape, path.string() + ":" + std::to_string(rows + 1) + ": row has " +
                                         std::to_string(fields.size()) + " values, expected " +
                                         std::to_string(*cols));
    }
    cols = fields.size();
    for (const auto& f : fields) {
      auto x = parse_number<double>(f);
      if (!x) {
        throw Error(ErrorKind::kLoad,
                    path.string() + ":" + std::to_string(rows + 1) + ": bad number '" +
                        std::string(f) + "'");
      }
      values.push_back(*x);
    }
    ++rows;
  }
  return FeatureMatrix(rows, cols.value_or(0), std::move(values));
}

std::uint64_t read_u64_le(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

void write_u64_le(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

FeatureMatrix read_binary_features(const fs::path& path) {
  auto in = open_input(path, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kFeatureMagic, 8) != 0) {
    throw Error(ErrorKind::kLoad, path.string() + ": not a binary feature matrix");
  }
  const std::uint64_t rows = read_u64_le(in);
  const std::uint64_t cols = read_u64_le(in);
  if (!in) throw Error(ErrorKind::kLoad, path.string() + ": truncated header");
  std::vector<double> values(rows * cols);
  for (double& x : values) {
    x = std::bit_cast<double>(read_u64_le(in));
  }
  if (!in) throw Error(ErrorKind::kLoad, path.string() + ": truncated payload");
  return FeatureMatrix(rows, cols, std::move(values));
}

std::vector<std::int32_t> read_labels(const fs::path& path) {
  auto in = open_input(path);
  std::vector<std::int32_t> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (auto f : split_fields(strip_comment(line))) {
      auto l = parse_number<std::int32_t>(f);
      if (!l) {
        throw Error(ErrorKind::kLoad, path.string() + ":" + std::to_string(line_no) +
                                          ": bad label '" + std::string(f) + "'");
      }
      labels.push_back(*l);
    }
  }
  return labels;
}

}  // namespace

Graph load_dataset(const fs::path& path, BundleFormat /*format*/) {
  if (!fs::is_directory(path)) {
    throw Error(ErrorKind::kLoad, "dataset bundle " + path.string() + " is not a directory");
  }
  const fs::path meta_path = path / "meta.txt";
  const auto meta = read_key_values(meta_path);

  GraphData data;
  data.name = meta.contains("name") ? meta.at("name") : path.filename().string();
  data.node_count = meta_size(meta, "n", meta_path, true);
  const std::size_t d = meta_size(meta, "d", meta_path, false);
  data.k = meta_size(meta, "k", meta_path, true);
  data.class_count = meta_size(meta, "classes", meta_path, false);
  if (auto it = meta.find("edge_convention"); it != meta.end()) {
    if (it->second == "entries") {
      data.edge_convention = EdgeConvention::kEntries;
    } else if (it->second != "undirected") {
      throw Error(ErrorKind::kLoad, meta_path.string() + ": unknown edge_convention '" +
                                        it->second + "'");
    }
  }
  if (auto it = meta.find("directed"); it != meta.end()) data.directed = it->second == "true";

  data.edges = read_edges(path / "edges.txt", data.node_count);

  if (meta.contains("d") && d == 0) {
    data.features = FeatureMatrix(data.node_count, 0, {});
  } else if (fs::exists(path / "features.bin")) {
    data.features = read_binary_features(path / "features.bin");
  } else if (fs::exists(path / "features.txt")) {
    data.features = read_text_features(path / "features.txt");
  } else {
    throw Error(ErrorKind::kLoad, path.string() + ": no features.txt or features.bin");
  }
  if (data.features.rows() != data.node_count) {
    throw Error(ErrorKind::kShape, path.string() + ": feature matrix has " +
                                       std::to_string(data.features.rows()) + " rows for " +
                                       std::to_string(data.node_count) + " nodes");
  }
  if (meta.contains("d") && data.features.cols() != d) {
    throw Error(ErrorKind::kShape, path.string() + ": feature matrix has " +
                                       std::to_string(data.features.cols()) + " columns, meta says " +
                                       std::to_string(d));
  }
  if (fs::exists(path / "labels.txt")) data.labels = read_labels(path / "labels.txt");

  Graph g = Graph::build(std::move(data));
  if (g.self_loops_dropped() > 0) {
    std::clog << "warning: " << g.name() << ": dropped " << g.self_loops_dropped()
              << " self-loop(s)\n";
  }
  return g;
}

void save_dataset(const Graph& g, const fs::path& path, FeatureEncoding encoding) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + path.string() + ": " + ec.message());
  auto open = [&](const fs::path& p, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(p, mode | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + p.string());
    return out;
  };
  {
    auto out = open(path / "meta.txt");
    out << "name = " << g.name() << "\n"
        << "n = " << g.node_count() << "\n"
        << "d = " << g.feature_dim() << "\n"
        << "k = " << g.k() << "\n"
        << "classes = " << g.class_count() << "\n"
        << "edge_convention = "
        << (g.edge_convention() == EdgeConvention::kEntries ? "entries" : "undirected") << "\n";
  }
  {
    auto out = open(path / "edges.txt");
    for (const Edge& e : g.edges()) {
      out << e.u << ' ' << e.v;
      if (e.weight != 1.0) out << ' ' << format_double(e.weight);
      out << '\n';
    }
  }
  fs::remove(path / "features.txt");
  fs::remove(path / "features.bin");
  const auto& x = g.features();
  if (encoding == FeatureEncoding::kBinary) {
    auto out = open(path / "features.bin", std::ios::out | std::ios::binary);
    out.write(kFeatureMagic, 8);
    write_u64_le(out, x.rows());
    write_u64_le(out, x.cols());
    for (double v : x.values()) write_u64_le(out, std::bit_cast<std::uint64_t>(v));
  } else {
    auto out = open(path / "features.txt");
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto row = x.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out << ' ';
        out << format_double(row[c]);
      }
      out << '\n';
    }
  }
  fs::remove(path / "labels.txt");
  if (g.labels()) {
    auto out = open(path / "labels.txt");
    for (std::int32_t l : *g.labels()) out << l << '\n';
  }
}

}  // namespace commbench
