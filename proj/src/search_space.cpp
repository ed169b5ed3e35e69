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

#include "commbench/search_space.hpp"

#include <cmath>

#include "commbench/error.hpp"
#include "commbench/text.hpp"

namespace commbench {

std::string to_string(const ParamValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(x);
        } else {
          return std::to_string(x);
        }
      },
      v);
}

nlohmann::json to_json(const ParamValue& v) {
  return std::visit([](const auto& x) { return nlohmann::json(x); }, v);
}

ParamValue param_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw Error(ErrorKind::kParse, "parameter value must be a number or string, got " + j.dump());
}

nlohmann::json to_json(const Params& params) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : params) j[k] = to_json(v);
  return j;
}

Params params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kParse, "parameters must be a JSON object");
  Params p;
  for (const auto& [k, v] : j.items()) p[k] = param_from_json(v);
  return p;
}

std::optional<double> as_number(const ParamValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

std::string_view to_string(DimensionKind kind) {
  switch (kind) {
    case DimensionKind::kCategorical: return "categorical";
    case DimensionKind::kUniform: return "uniform";
    case DimensionKind::kLogUniform: return "log-uniform";
    case DimensionKind::kIntUniform: return "int-uniform";
  }
  return "?";
}

Dimension Dimension::categorical(std::string name, std::vector<ParamValue> choices) {
  Dimension d;
  d.name = std::move(name);
  d.kind = DimensionKind::kCategorical;
  d.choices = std::move(choices);
  return d;
}

Dimension Dimension::uniform(std::string name, double low, double high) {
  Dimension d;
  d.name = std::move(name);
  d.kind = DimensionKind::kUniform;
  d.low = low;
  d.high = high;
  return d;
}

Dimension Dimension::log_uniform(std::string name, double low, double high) {
  Dimension d = uniform(std::move(name), low, high);
  d.kind = DimensionKind::kLogUniform;
  return d;
}

Dimension Dimension::int_uniform(std::string name, std::int64_t low, std::int64_t high) {
  Dimension d = uniform(std::move(name), static_cast<double>(low), static_cast<double>(high));
  d.kind = DimensionKind::kIntUniform;
  return d;
}

Dimension&& Dimension::when(std::string parent, ParamValue value) && {
  condition = Condition{std::move(parent), std::move(value)};
  return std::move(*this);
}

SearchSpace::SearchSpace(std::initializer_list<Dimension> dims) {
  for (const auto& d : dims) add(d);
}

void SearchSpace::add(Dimension dim) {
  if (dim.name.empty()) throw Error(ErrorKind::kConfig, "dimension name is empty");
  if (find(dim.name)) throw Error(ErrorKind::kConfig, "duplicate dimension '" + dim.name + "'");
  switch (dim.kind) {
    case DimensionKind::kCategorical:
      if (dim.choices.empty()) {
        throw Error(ErrorKind::kConfig, "categorical dimension '" + dim.name + "' has no choices");
      }
      break;
    case DimensionKind::kLogUniform:
      if (!(dim.low > 0.0)) {
        throw Error(ErrorKind::kConfig, "log-uniform dimension '" + dim.name +
                                            "' needs a positive lower bound");
      }
      [[fallthrough]];
    case DimensionKind::kUniform:
    case DimensionKind::kIntUniform:
      if (!(dim.low <= dim.high) || !std::isfinite(dim.low) || !std::isfinite(dim.high)) {
        throw Error(ErrorKind::kConfig, "dimension '" + dim.name + "' has invalid bounds");
      }
      break;
  }
  if (dim.condition) {
    const Dimension* parent = find(dim.condition->parent);
    if (!parent) {
      throw Error(ErrorKind::kConfig, "dimension '" + dim.name + "' depends on '" +
                                          dim.condition->parent +
                                          "', which is not declared before it");
    }
  }
  dims_.push_back(std::move(dim));
}

const Dimension* SearchSpace::find(const std::string& name) const {
  for (const auto& d : dims_) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

bool SearchSpace::is_active(const Dimension& dim, const Params& params) const {
  if (!dim.condition) return true;
  const Dimension* parent = find(dim.condition->parent);
  if (!parent || !is_active(*parent, params)) return false;
  auto it = params.find(parent->name);
  return it != params.end() && it->second == dim.condition->value;
}

bool SearchSpace::contains(const Params& params, std::string* why) const {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  for (const auto& [name, value] : params) {
    if (!find(name)) return fail("unknown parameter '" + name + "'");
  }
  for (const auto& d : dims_) {
    const bool active = is_active(d, params);
    auto it = params.find(d.name);
    if (!active) {
      if (it != params.end()) return fail("inactive parameter '" + d.name + "' is set");
      continue;
    }
    if (it == params.end()) return fail("active parameter '" + d.name + "' is missing");
    const ParamValue& v = it->second;
    switch (d.kind) {
      case DimensionKind::kCategorical: {
        bool found = false;
        for (const auto& c : d.choices) found = found || c == v;
        if (!found) return fail("'" + d.name + "' = " + to_string(v) + " is not a choice");
        break;
      }
      case DimensionKind::kIntUniform: {
        const auto* i = std::get_if<std::int64_t>(&v);
        if (!i || static_cast<double>(*i) < d.low || static_cast<double>(*i) > d.high) {
          return fail("'" + d.name + "' = " + to_string(v) + " outside integer domain");
        }
        break;
      }
      case DimensionKind::kUniform:
      case DimensionKind::kLogUniform: {
        const auto* x = std::get_if<double>(&v);
        if (!x || *x < d.low || *x > d.high) {
          return fail("'" + d.name + "' = " + to_string(v) + " outside [" +
                      format_double(d.low) + ", " + format_double(d.high) + "]");
        }
        break;
      }
    }
  }
  return true;
}

nlohmann::json SearchSpace::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& d : dims_) {
    nlohmann::json j;
    j["name"] = d.name;
    j["kind"] = std::string(commbench::to_string(d.kind));
    if (d.kind == DimensionKind::kCategorical) {
      j["choices"] = nlohmann::json::array();
      for (const auto& c : d.choices) j["choices"].push_back(commbench::to_json(c));
    } else if (d.kind == DimensionKind::kIntUniform) {
      j["low"] = static_cast<std::int64_t>(d.low);
      j["high"] = static_cast<std::int64_t>(d.high);
    } else {
      j["low"] = d.low;
      j["high"] = d.high;
    }
    if (d.condition) {
      j["when"] = {{"parent", d.condition->parent},
                   {"value", commbench::to_json(d.condition->value)}};
    }
    out.push_back(std::move(j));
  }
  return out;
}

SearchSpace SearchSpace::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorKind::kParse, "search space must be a JSON array");
  SearchSpace space;
  try {
    for (const auto& item : j) {
      const auto name = item.at("name").get<std::string>();
      const auto kind = item.at("kind").get<std::string>();
      Dimension d;
      if (kind == "categorical") {
        std::vector<ParamValue> choices;
        for (const auto& c : item.at("choices")) choices.push_back(param_from_json(c));
        d = Dimension::categorical(name, std::move(choices));
      } else if (kind == "uniform") {
        d = Dimension::uniform(name, item.at("low").get<double>(), item.at("high").get<double>());
      } else if (kind == "log-uniform") {
        d = Dimension::log_uniform(name, item.at("low").get<double>(),
                                   item.at("high").get<double>());
      } else if (kind == "int-uniform") {
        d = Dimension::int_uniform(name, item.at("low").get<std::int64_t>(),
                                   item.at("high").get<std::int64_t>());
      } else {
        throw Error(ErrorKind::kParse, "unknown dimension kind '" + kind + "'");
      }
      if (item.contains("when")) {
        d.condition = Condition{item["when"].at("parent").get<std::string>(),
                                param_from_json(item["when"].at("value"))};
      }
      space.add(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("malformed search space: ") + e.what());
  }
  return space;
}

}  // namespace commbench
