/*
 * Copyright 2026 The AIDS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "aids/transport.hpp"

#include <gtest/gtest.h>

#include "aids/errors.hpp"
#include "test_support.hpp"

namespace aids {
namespace {

using testing::make_record;
using testing::toy_corpus;

class TransportTest : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus = toy_corpus(20, 1);
    CentralConfig cfg;
    cfg.officer = OfficerPolicy::Oracle;
    cfg.retrain_threshold = 3;
    cfg.spec.smo.C = 100.0;
    service = std::make_unique<CentralService>(Central(cfg, corpus, train(TrainSpec{}, corpus, 0)));
    server = std::make_unique<CentralServer>(*service);
    port = server->start("127.0.0.1", 0);
  }

  void TearDown() override {
    server->stop();
    service->wait_for_retrain();
  }

  static ConnectionRecord attack() { return make_record("icmp", "ecr_i", "SF", 1000, "smurf"); }
  static ConnectionRecord normal() { return make_record("tcp", "http", "SF", 300); }

  static Envelope next(LineSocket& s) {
    auto line = s.read_line();
    EXPECT_TRUE(line.has_value());
    return decode_message(line.value_or(""));
  }

  std::vector<ConnectionRecord> corpus;
  std::unique_ptr<CentralService> service;
  std::unique_ptr<CentralServer> server;
  int port = 0;
};

TEST_F(TransportTest, RegisterReceivesCurrentModel) {
  auto s = tcp_connect("127.0.0.1", port);
  s->send({"m1", kProtocolVersion, RegisterBody{"m1", NodeRole::NetLan}});
  EXPECT_EQ(next(*s).type(), MsgType::Ack);
  const auto update = next(*s);
  ASSERT_EQ(update.type(), MsgType::ModelUpdate);
  EXPECT_EQ(std::get<ModelUpdate>(update.body).version, 1u);
}

TEST_F(TransportTest, GarbageGetsErrorReply) {
  auto s = tcp_connect("127.0.0.1", port);
  s->write_line("{not json");
  const auto reply = next(*s);
  ASSERT_EQ(reply.type(), MsgType::Error);
  EXPECT_EQ(std::get<ErrorBody>(reply.body).code, "ProtocolError");
}

TEST_F(TransportTest, HoneypotEvidenceTriggersBroadcast) {
  auto mon = tcp_connect("127.0.0.1", port);
  mon->send({"m1", kProtocolVersion, RegisterBody{"m1", NodeRole::NetLan}});
  next(*mon);
  next(*mon);

  HoneypotRunOptions hp;
  hp.port = port;
  hp.seed = 3;
  const std::vector<ConnectionRecord> stream = {attack(), normal(), attack(), attack()};
  EXPECT_EQ(run_honeypot(hp, stream), 3u);
  service->wait_for_retrain();

  const auto update = next(*mon);
  ASSERT_EQ(update.type(), MsgType::ModelUpdate);
  EXPECT_EQ(std::get<ModelUpdate>(update.body).version, 2u);
  EXPECT_EQ(service->read([](const Central& c) { return c.model_version(); }), 2u);
}

TEST_F(TransportTest, MonitorRunSendsAlarms) {
  MonitorRunOptions opt;
  opt.port = port;
  opt.node_id = "m7";
  const std::vector<ConnectionRecord> stream = {attack(), normal(), attack(), normal()};
  const auto summary = run_monitor(opt, stream);
  EXPECT_EQ(summary.counters.records_seen, 4u);
  EXPECT_EQ(summary.counters.alarms_raised, 2u);
  EXPECT_EQ(summary.versions, std::vector<std::uint64_t>{1});

  const auto alarms = service->read([](const Central& c) { return c.alarms(); });
  ASSERT_EQ(alarms.size(), 2u);
  for (const auto& a : alarms) {
    EXPECT_EQ(a.alarm.node_id, "m7");
    EXPECT_EQ(a.alarm.status, AlarmStatus::ConfirmedAttack);  // Oracle policy
  }
  const auto nodes = service->read([](const Central& c) { return c.nodes(); });
  ASSERT_EQ(nodes.size(), 1u);
  EXPECT_EQ(nodes[0].applied_version, 1u);
}

TEST(TransportErrors, ConnectRefused) {
  TcpListener probe("127.0.0.1", 0);
  const int port = probe.port();
  probe.close();
  EXPECT_THROW(tcp_connect("127.0.0.1", port), IoError);
}

}  // namespace
}  // namespace aids
