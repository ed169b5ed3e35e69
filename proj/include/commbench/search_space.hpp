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
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace commbench {

using ParamValue = std::variant<std::int64_t, double, std::string>;
using Params = std::map<std::string, ParamValue>;

std::string to_string(const ParamValue& v);
nlohmann::json to_json(const ParamValue& v);
/// Integers map to int64, other numbers to double, strings to string.
ParamValue param_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Params& params);
Params params_from_json(const nlohmann::json& j);

/// Numeric view of a parameter; strings yield nullopt.
std::optional<double> as_number(const ParamValue& v);

enum class DimensionKind { kCategorical, kUniform, kLogUniform, kIntUniform };

std::string_view to_string(DimensionKind kind);

/// A dimension is active only when its parent is active and holds `value`.
struct Condition {
  std::string parent;
  ParamValue value;
};

struct Dimension {
  std::string name;
  DimensionKind kind = DimensionKind::kUniform;
  std::vector<ParamValue> choices;  // categorical
  double low = 0.0;                 // numeric kinds, inclusive
  double high = 1.0;
  std::optional<Condition> condition;

  static Dimension categorical(std::string name, std::vector<ParamValue> choices);
  static Dimension uniform(std::string name, double low, double high);
  static Dimension log_uniform(std::string name, double low, double high);
  static Dimension int_uniform(std::string name, std::int64_t low, std::int64_t high);

  Dimension&& when(std::string parent, ParamValue value) &&;
};

/// Ordered set of dimensions. A conditional dimension must be added after its
/// parent, which keeps the condition graph a forest.
class SearchSpace {
 public:
  SearchSpace() = default;
  SearchSpace(std::initializer_list<Dimension> dims);

  /// Throws kConfig on duplicate names, unknown parents, empty categorical
  /// domains or inverted bounds.
  void add(Dimension dim);

  const std::vector<Dimension>& dimensions() const { return dims_; }
  bool empty() const { return dims_.empty(); }
  const Dimension* find(const std::string& name) const;

  /// Whether `dim` should carry a value given the other parameters.
  bool is_active(const Dimension& dim, const Params& params) const;

  /// True when `params` holds exactly the active dimensions with in-domain
  /// values. `why` receives the first violation.
  bool contains(const Params& params, std::string* why = nullptr) const;

  nlohmann::json to_json() const;
  static SearchSpace from_json(const nlohmann::json& j);

 private:
  std::vector<Dimension> dims_;
};

}  // namespace commbench
