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

// Runner protocol v1. Every message is an ASCII decimal byte count, a single
// '\n', then that many bytes of UTF-8 JSON. See docs/protocol.md.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "commbench/graph.hpp"
#include "commbench/search_space.hpp"

namespace commbench {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kMaxMessageBytes = std::size_t{1} << 30;

enum class RunStatus { kOk, kOom, kTimeout, kCrash };

std::string_view to_string(RunStatus s);
std::optional<RunStatus> parse_run_status(std::string_view name);

struct TrainRequest {
  std::string dataset_path;
  Params params;
  std::int64_t seed = 0;
  std::int64_t max_epochs = 5000;
  std::int64_t patience = 100;
  std::int64_t k = 0;
  std::vector<NodeId> train_nodes;
  std::vector<NodeId> val_nodes;
};

struct TrainResponse {
  RunStatus status = RunStatus::kCrash;
  std::vector<std::int32_t> partition;  // empty unless status is ok
  std::int64_t epochs_used = 0;
  double wall_time = 0.0;
  std::string error;
};

namespace protocol {

/// "<len>\n<payload>" for the compact dump of `message`.
std::string frame(const nlohmann::json& message);

/// Incremental decoder for a byte stream carrying framed messages.
class FrameDecoder {
 public:
  void feed(std::string_view bytes) { buffer_.append(bytes); }
  /// The next complete message, if one is buffered. Throws kProtocol on a
  /// malformed header, an oversized length or a payload that is not JSON.
  std::optional<nlohmann::json> next();
  bool empty() const { return buffer_.empty(); }

 private:
  std::string buffer_;
};

/// Blocking helpers for the runner side. read_message returns nullopt on a
/// clean end of stream before any header byte.
std::optional<nlohmann::json> read_message(std::istream& in);
void write_message(std::ostream& out, const nlohmann::json& message);

nlohmann::json hello(std::string_view name);
nlohmann::json hello_ack(std::string_view name);

nlohmann::json to_json(const TrainRequest& req);
TrainRequest train_request_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrainResponse& resp);
/// Throws kProtocol when the message is not a well-formed `result`.
TrainResponse train_response_from_json(const nlohmann::json& j);

}  // namespace protocol
}  // namespace commbench
