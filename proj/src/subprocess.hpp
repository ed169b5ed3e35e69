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

#include <sys/types.h>

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "commbench/protocol.hpp"

namespace commbench::detail {

using Clock = std::chrono::steady_clock;

struct DeadlineExceeded {};

struct ExitStatus {
  std::optional<int> code;
  std::optional<int> signal;
  bool killed = false;  // the harness sent the signal
};

/// A child in its own process group with piped stdin/stdout/stderr. The
/// destructor kills the whole group if the child has not been reaped.
class ChildProcess {
 public:
  /// Throws kIo when the pipes or the fork fail. An exec failure surfaces as
  /// exit code 127.
  ChildProcess(const std::vector<std::string>& argv, std::uint64_t memory_bytes);
  ~ChildProcess();
  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  /// Returns false when the child closed its end. Throws DeadlineExceeded.
  bool send(std::string_view bytes, Clock::time_point deadline);
  /// Next framed message; nullopt on end of stream. Throws DeadlineExceeded
  /// and kProtocol.
  std::optional<nlohmann::json> receive(Clock::time_point deadline);
  void close_stdin();
  /// Waits for exit; kills the group at the deadline (signal SIGKILL).
  ExitStatus wait(Clock::time_point deadline);
  void kill_group();
  /// Last few kilobytes written to stderr.
  const std::string& stderr_tail() const { return stderr_tail_; }

 private:
  void pump(int timeout_ms, bool want_stdout);
  void append_stderr(std::string_view bytes);

  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  int stderr_fd_ = -1;
  bool reaped_ = false;
  ExitStatus status_;
  protocol::FrameDecoder decoder_;
  std::string stderr_tail_;
};

}  // namespace commbench::detail
