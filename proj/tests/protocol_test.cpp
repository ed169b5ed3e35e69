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

#include <sstream>

#include "commbench/error.hpp"
#include "commbench/protocol.hpp"

namespace commbench {
namespace {

using nlohmann::json;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::kIo;
}

TEST(Frame, PrefixesDecimalByteCount) {
  EXPECT_EQ(protocol::frame(json{{"type", "hello"}}), "16\n{\"type\":\"hello\"}");
  const std::string utf8 = protocol::frame(json{{"name", "\xc3\xa9"}});
  EXPECT_EQ(utf8.substr(0, 3), "13\n");
}

TEST(FrameDecoder, HandlesSplitAndCoalescedInput) {
  const std::string a = protocol::frame(protocol::hello("x"));
  const std::string b = protocol::frame(protocol::hello_ack("y"));
  const std::string stream = a + b;
  protocol::FrameDecoder dec;
  for (std::size_t cut = 0; cut <= stream.size(); ++cut) {
    protocol::FrameDecoder d;
    d.feed(std::string_view(stream).substr(0, cut));
    std::vector<json> got;
    while (auto m = d.next()) got.push_back(*m);
    d.feed(std::string_view(stream).substr(cut));
    while (auto m = d.next()) got.push_back(*m);
    ASSERT_EQ(got.size(), 2u) << cut;
    EXPECT_EQ(got[0]["type"], "hello");
    EXPECT_EQ(got[1]["type"], "hello_ack");
    EXPECT_TRUE(d.empty());
  }
}

TEST(FrameDecoder, RejectsMalformedInput) {
  for (std::string bad : {"x\n{}", "-1\n{}", "\n{}", "3\n[1]", "5\nnope!", "99999999999\n"}) {
    protocol::FrameDecoder d;
    d.feed(bad);
    EXPECT_EQ(kind_of([&] { d.next(); }), ErrorKind::kProtocol) << bad;
  }
  protocol::FrameDecoder d;
  d.feed("123456789012345");  // no newline, too long to be a header
  EXPECT_EQ(kind_of([&] { d.next(); }), ErrorKind::kProtocol);
}

TEST(ReadMessage, StreamsAndEndOfInput) {
  std::istringstream in(protocol::frame(protocol::hello("a")) + protocol::frame(json{{"type", "x"}}));
  EXPECT_EQ((*protocol::read_message(in))["name"], "a");
  EXPECT_EQ((*protocol::read_message(in))["type"], "x");
  EXPECT_FALSE(protocol::read_message(in).has_value());

  std::istringstream truncated("10\n{\"a\":");
  EXPECT_EQ(kind_of([&] { protocol::read_message(truncated); }), ErrorKind::kProtocol);
  std::istringstream half_header("12");
  EXPECT_EQ(kind_of([&] { protocol::read_message(half_header); }), ErrorKind::kProtocol);
}

TEST(Messages, HandshakeFieldsAreExact) {
  EXPECT_EQ(protocol::hello("commbench").dump(),
            R"({"name":"commbench","protocol":1,"type":"hello"})");
  EXPECT_EQ(protocol::hello_ack("r").dump(), R"({"name":"r","protocol":1,"type":"hello_ack"})");
}

TEST(Messages, TrainRequestRoundTrip) {
  TrainRequest req;
  req.dataset_path = "/data/texas";
  req.params = {{"learning_rate", 0.01}, {"patience", std::int64_t{25}}, {"act", std::string("relu")}};
  req.seed = 976;
  req.max_epochs = 5000;
  req.patience = 25;
  req.k = 5;
  req.train_nodes = {0, 3, 4};
  req.val_nodes = {1};
  const json j = protocol::to_json(req);
  EXPECT_EQ(j["type"], "train");
  for (const char* key : {"dataset_path", "params", "seed", "max_epochs", "patience", "k",
                          "train_nodes", "val_nodes"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  const TrainRequest back = protocol::train_request_from_json(json::parse(j.dump()));
  EXPECT_EQ(back.dataset_path, req.dataset_path);
  EXPECT_EQ(back.params, req.params);
  EXPECT_EQ(back.seed, req.seed);
  EXPECT_EQ(back.k, req.k);
  EXPECT_EQ(back.train_nodes, req.train_nodes);
  EXPECT_EQ(back.val_nodes, req.val_nodes);
}

TEST(Messages, ResultParsing) {
  TrainResponse r;
  r.status = RunStatus::kOk;
  r.partition = {0, 1, 1};
  r.epochs_used = 12;
  r.wall_time = 0.25;
  const TrainResponse back = protocol::train_response_from_json(protocol::to_json(r));
  EXPECT_EQ(back.status, RunStatus::kOk);
  EXPECT_EQ(back.partition, r.partition);
  EXPECT_EQ(back.epochs_used, 12);
  EXPECT_DOUBLE_EQ(back.wall_time, 0.25);

  json bad = protocol::to_json(r);
  bad["status"] = "fine";
  EXPECT_EQ(kind_of([&] { protocol::train_response_from_json(bad); }), ErrorKind::kProtocol);
  bad = protocol::to_json(r);
  bad.erase("epochs_used");
  EXPECT_EQ(kind_of([&] { protocol::train_response_from_json(bad); }), ErrorKind::kProtocol);
  bad = protocol::to_json(r);
  bad["partition"] = {0, "one"};
  EXPECT_EQ(kind_of([&] { protocol::train_response_from_json(bad); }), ErrorKind::kProtocol);
  bad = protocol::to_json(r);
  bad["type"] = "hello";
  EXPECT_EQ(kind_of([&] { protocol::train_response_from_json(bad); }), ErrorKind::kProtocol);
}

TEST(Messages, StatusNames) {
  for (auto s : {RunStatus::kOk, RunStatus::kOom, RunStatus::kTimeout, RunStatus::kCrash}) {
    EXPECT_EQ(parse_run_status(to_string(s)), s);
  }
  EXPECT_FALSE(parse_run_status("OK").has_value());
}

}  // namespace
}  // namespace commbench
