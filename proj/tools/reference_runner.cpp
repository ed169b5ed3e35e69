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

// Serves one builtin clusterer over protocol v1 on stdin/stdout. The --fault
// switch makes it misbehave in one specific way, for exercising the harness.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <random>
#include <thread>

#include <CLI11.hpp>

#include "commbench/error.hpp"
#include "commbench/protocol.hpp"
#include "commbench/runner.hpp"

namespace {

using commbench::RunStatus;
using commbench::TrainResponse;

void send(const nlohmann::json& msg) { commbench::protocol::write_message(std::cout, msg); }

[[noreturn]] void violation(const std::string& what) {
  send({{"type", "error"}, {"message", what}});
  std::exit(3);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reference runner: a builtin clusterer behind the runner protocol"};
  std::string algorithm = "kmeans";
  std::string fault = "none";
  double sleep_seconds = 3600.0;
  app.add_option("--algorithm", algorithm, "kmeans, label-propagation, greedy-modularity or random-partition");
  app.add_option("--fault", fault, "none, wrong-length, nondeterministic, sleep, crash, oom, garbage, accept-bad-k")
      ->check(CLI::IsMember({"none", "wrong-length", "nondeterministic", "sleep", "crash", "oom",
                             "garbage", "accept-bad-k"}));
  app.add_option("--sleep-seconds", sleep_seconds, "Delay used by --fault sleep");
  CLI11_PARSE(app, argc, argv);

  const auto builtin = commbench::parse_builtin(algorithm);
  if (!builtin) {
    std::cerr << "unknown algorithm " << algorithm << "\n";
    return 2;
  }
  std::ios::sync_with_stdio(false);
  const std::string name = "reference-" + algorithm;

  try {
    auto hello = commbench::protocol::read_message(std::cin);
    if (!hello) return 0;
    if (hello->value("type", "") != "hello") violation("expected hello");
    send(commbench::protocol::hello_ack(name));

    std::map<std::string, commbench::Graph> cache;
    while (auto msg = commbench::protocol::read_message(std::cin)) {
      if (msg->value("type", "") != "train") violation("expected train");
      commbench::TrainRequest req = commbench::protocol::train_request_from_json(*msg);

      if (fault == "crash") std::abort();
      if (fault == "garbage") {
        std::cout << "17\nthis is not json!" << std::flush;
        continue;
      }
      if (fault == "sleep") {
        std::this_thread::sleep_for(std::chrono::duration<double>(sleep_seconds));
      }

      TrainResponse resp;
      try {
        if (fault == "oom") {
          std::vector<char> hog(std::size_t{1} << 62);
          hog[0] = 1;
        }
        auto it = cache.find(req.dataset_path);
        if (it == cache.end()) {
          it = cache.emplace(req.dataset_path, commbench::load_dataset(req.dataset_path)).first;
        }
        if (fault == "nondeterministic") req.seed += static_cast<std::int64_t>(std::random_device{}() % 1000 + 1);
        if (fault == "accept-bad-k" && req.k < 1) {
          resp.status = RunStatus::kOk;
          resp.partition.assign(it->second.node_count(), 0);
        } else {
          resp = commbench::run_builtin(*builtin, req, it->second);
        }
      } catch (const std::bad_alloc&) {
        resp = {};
        resp.status = RunStatus::kOom;
        resp.error = "out of memory";
      } catch (const std::exception& e) {
        resp = {};
        resp.status = RunStatus::kCrash;
        resp.error = e.what();
      }
      if (fault == "wrong-length" && !resp.partition.empty()) resp.partition.pop_back();
      send(commbench::protocol::to_json(resp));
    }
  } catch (const commbench::Error& e) {
    violation(e.what());
  }
  return 0;
}
