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

#include "commbench/protocol.hpp"

#include <istream>
#include <ostream>

#include "commbench/error.hpp"
#include "commbench/text.hpp"

namespace commbench {
namespace {

using nlohmann::json;

constexpr std::size_t kMaxHeaderDigits = 10;

[[noreturn]] void protocol_error(const std::string& what) {
  throw Error(ErrorKind::kProtocol, what);
}

std::size_t parse_header(std::string_view digits) {
  if (digits.empty() || digits.size() > kMaxHeaderDigits) {
    protocol_error("malformed length header '" + std::string(digits) + "'");
  }
  for (char c : digits) {
    if (c < '0' || c > '9') protocol_error("malformed length header '" + std::string(digits) + "'");
  }
  const auto n = parse_number<std::uint64_t>(digits);
  if (!n || *n > kMaxMessageBytes) protocol_error("message length exceeds limit");
  return static_cast<std::size_t>(*n);
}

json parse_payload(std::string_view payload) {
  json j = json::parse(payload, nullptr, false);
  if (j.is_discarded() || !j.is_object()) protocol_error("payload is not a JSON object");
  return j;
}

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) protocol_error(std::string("missing field '") + name + "'");
  return *it;
}

std::int64_t int_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number_integer()) protocol_error(std::string("field '") + name + "' must be an integer");
  return v.get<std::int64_t>();
}

std::vector<NodeId> node_list(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_array()) protocol_error(std::string("field '") + name + "' must be an array");
  std::vector<NodeId> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number_unsigned()) protocol_error(std::string("field '") + name + "' holds a non-node id");
    out.push_back(x.get<NodeId>());
  }
  return out;
}

void expect_type(const json& j, std::string_view type) {
  const json& t = field(j, "type");
  if (!t.is_string() || t.get<std::string>() != type) {
    protocol_error("expected message type '" + std::string(type) + "'");
  }
}

}  // namespace

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kOk: return "ok";
    case RunStatus::kOom: return "oom";
    case RunStatus::kTimeout: return "timeout";
    case RunStatus::kCrash: return "crash";
  }
  return "?";
}

std::optional<RunStatus> parse_run_status(std::string_view name) {
  for (RunStatus s : {RunStatus::kOk, RunStatus::kOom, RunStatus::kTimeout, RunStatus::kCrash}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

namespace protocol {

std::string frame(const json& message) {
  const std::string payload = message.dump();
  return std::to_string(payload.size()) + "\n" + payload;
}

std::optional<json> FrameDecoder::next() {
  const auto nl = buffer_.find('\n');
  if (nl == std::string::npos) {
    if (buffer_.size() > kMaxHeaderDigits) parse_header(buffer_.substr(0, kMaxHeaderDigits + 1));
    return std::nullopt;
  }
  const std::size_t len = parse_header(std::string_view(buffer_).substr(0, nl));
  if (buffer_.size() - nl - 1 < len) return std::nullopt;
  json j = parse_payload(std::string_view(buffer_).substr(nl + 1, len));
  buffer_.erase(0, nl + 1 + len);
  return j;
}

std::optional<json> read_message(std::istream& in) {
  std::string header;
  char c;
  while (in.get(c)) {
    if (c == '\n') break;
    header.push_back(c);
    if (header.size() > kMaxHeaderDigits) parse_header(header);
  }
  if (!in) {
    if (header.empty()) return std::nullopt;
    protocol_error("stream ended inside a length header");
  }
  const std::size_t len = parse_header(header);
  std::string payload(len, '\0');
  if (!in.read(payload.data(), static_cast<std::streamsize>(len))) {
    protocol_error("stream ended after " + std::to_string(in.gcount()) + " of " +
                   std::to_string(len) + " payload bytes");
  }
  return parse_payload(payload);
}

void write_message(std::ostream& out, const json& message) {
  out << frame(message);
  out.flush();
}

json hello(std::string_view name) {
  return {{"type", "hello"}, {"protocol", kProtocolVersion}, {"name", name}};
}

json hello_ack(std::string_view name) {
  return {{"type", "hello_ack"}, {"protocol", kProtocolVersion}, {"name", name}};
}

json to_json(const TrainRequest& req) {
  return {{"type", "train"},
          {"dataset_path", req.dataset_path},
          {"params", commbench::to_json(req.params)},
          {"seed", req.seed},
          {"max_epochs", req.max_epochs},
          {"patience", req.patience},
          {"k", req.k},
          {"train_nodes", req.train_nodes},
          {"val_nodes", req.val_nodes}};
}

TrainRequest train_request_from_json(const json& j) {
  expect_type(j, "train");
  TrainRequest req;
  const json& path = field(j, "dataset_path");
  if (!path.is_string()) protocol_error("field 'dataset_path' must be a string");
  req.dataset_path = path.get<std::string>();
  const json& params = field(j, "params");
  if (!params.is_object()) protocol_error("field 'params' must be an object");
  try {
    req.params = params_from_json(params);
  } catch (const Error& e) {
    protocol_error(std::string("field 'params': ") + e.what());
  }
  req.seed = int_field(j, "seed");
  req.max_epochs = int_field(j, "max_epochs");
  req.patience = int_field(j, "patience");
  req.k = int_field(j, "k");
  req.train_nodes = node_list(j, "train_nodes");
  req.val_nodes = node_list(j, "val_nodes");
  return req;
}

json to_json(const TrainResponse& resp) {
  json j = {{"type", "result"},
            {"status", commbench::to_string(resp.status)},
            {"partition", resp.partition},
            {"epochs_used", resp.epochs_used},
            {"wall_time", resp.wall_time}};
  if (!resp.error.empty()) j["error"] = resp.error;
  return j;
}

TrainResponse train_response_from_json(const json& j) {
  expect_type(j, "result");
  TrainResponse resp;
  const json& status = field(j, "status");
  const auto parsed = status.is_string() ? parse_run_status(status.get<std::string>()) : std::nullopt;
  if (!parsed) protocol_error("field 'status' must be one of ok, oom, timeout, crash");
  resp.status = *parsed;
  const json& partition = field(j, "partition");
  if (!partition.is_array()) protocol_error("field 'partition' must be an array");
  resp.partition.reserve(partition.size());
  for (const auto& x : partition) {
    if (!x.is_number_integer()) protocol_error("field 'partition' holds a non-integer");
    const auto v = x.get<std::int64_t>();
    if (v < INT32_MIN || v > INT32_MAX) protocol_error("partition entry out of range");
    resp.partition.push_back(static_cast<std::int32_t>(v));
  }
  resp.epochs_used = int_field(j, "epochs_used");
  const json& wall = field(j, "wall_time");
  if (!wall.is_number()) protocol_error("field 'wall_time' must be a number");
  resp.wall_time = wall.get<double>();
  if (auto it = j.find("error"); it != j.end() && it->is_string()) resp.error = it->get<std::string>();
  return resp;
}

}  // namespace protocol
}  // namespace commbench
