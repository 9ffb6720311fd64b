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

#include "aids/service.hpp"

#include <atomic>
#include <future>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "aids/errors.hpp"
#include "test_support.hpp"

// After the Eigen-bearing headers: <resolv.h> defines a _res macro.
#include <httplib.h>

namespace aids {
namespace {

using nlohmann::json;
using testing::make_record;
using testing::toy_corpus;

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus = toy_corpus(20, 1);
    artifact = train(TrainSpec{}, corpus, 0);
  }

  std::unique_ptr<CentralService> make_service(OfficerPolicy officer, std::size_t k = 100) {
    CentralConfig cfg;
    cfg.officer = officer;
    cfg.retrain_threshold = k;
    cfg.spec.smo.C = 100.0;
    auto svc = std::make_unique<CentralService>(Central(cfg, corpus, artifact), [] { return 42; });
    svc->set_broadcast([this](const Envelope& env) {
      std::lock_guard<std::mutex> lock(sent_mu);
      sent.push_back(env);
    });
    return svc;
  }

  static Envelope alarm_env(const std::string& id, const ConnectionRecord& r,
                            AlarmSource source = AlarmSource::NetLan) {
    AlarmReport a;
    a.alarm_id = id;
    a.source = source;
    a.node_id = "mon";
    a.record = r;
    a.score = 0.9;
    a.model_version_used = 1;
    if (source == AlarmSource::HnMonitor) a.status = AlarmStatus::ConfirmedAttack;
    return Envelope{"mon", kProtocolVersion, a};
  }

  static ConnectionRecord attack() { return make_record("icmp", "ecr_i", "SF", 1000, "smurf"); }
  static ConnectionRecord normal() { return make_record("tcp", "http", "SF", 300); }

  static json call(CentralService& svc, const std::string& method, const std::string& path,
                   int expected, const std::string& body = "",
                   const std::map<std::string, std::string>& query = {}) {
    const auto r = svc.handle_http(method, path, query, body);
    EXPECT_EQ(r.status, expected) << method << " " << path << ": " << r.body;
    return json::parse(r.body);
  }

  std::vector<ConnectionRecord> corpus;
  ClassifierArtifact artifact;
  std::mutex sent_mu;
  std::vector<Envelope> sent;
};

TEST_F(ServiceTest, ListsAndFiltersAlarms) {
  auto svc = make_service(OfficerPolicy::Manual);
  svc->on_envelope(alarm_env("mon:1", attack()));
  svc->on_envelope(alarm_env("hn:1", attack(), AlarmSource::HnMonitor));
  const auto all = call(*svc, "GET", "/alarms", 200);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0]["alarm_id"], "mon:1");
  EXPECT_EQ(all[1]["source"], "hn_monitor");

  const auto pending = call(*svc, "GET", "/alarms", 200, "", {{"status", "pending"}});
  ASSERT_EQ(pending.size(), 1u);
  EXPECT_EQ(pending[0]["alarm_id"], "mon:1");
  const auto confirmed = call(*svc, "GET", "/alarms", 200, "", {{"status", "confirmed_attack"}});
  ASSERT_EQ(confirmed.size(), 1u);
  EXPECT_EQ(confirmed[0]["alarm_id"], "hn:1");
  call(*svc, "GET", "/alarms", 400, "", {{"status", "bogus"}});
}

TEST_F(ServiceTest, AlarmDetailHasNamedFeatures) {
  auto svc = make_service(OfficerPolicy::Manual);
  svc->on_envelope(alarm_env("mon:1", attack()));
  const auto d = call(*svc, "GET", "/alarms/mon:1", 200);
  ASSERT_EQ(d["feature_names"].size(), kNumFeatures);
  EXPECT_EQ(d["feature_names"][0], "duration");
  EXPECT_EQ(d["record"]["features"].size(), kNumFeatures);
  EXPECT_TRUE(d["verdict"].is_null());
  const auto missing = call(*svc, "GET", "/alarms/nope", 404);
  EXPECT_EQ(missing["error"], "NotFound");
}

TEST_F(ServiceTest, VerdictEndpoint) {
  auto svc = make_service(OfficerPolicy::Manual);
  svc->on_envelope(alarm_env("mon:1", attack()));
  call(*svc, "POST", "/alarms/mon:1/verdict", 400, "not json");
  call(*svc, "POST", "/alarms/mon:1/verdict", 400, R"({"decision":"maybe"})");
  call(*svc, "POST", "/alarms/mon:1/verdict", 400, R"({"verdict":"false_alarm"})");
  const auto row = call(*svc, "POST", "/alarms/mon:1/verdict", 200, R"({"decision":"false_alarm"})");
  EXPECT_EQ(row["status"], "false_alarm");
  call(*svc, "POST", "/alarms/mon:1/verdict", 409, R"({"decision":"confirmed_attack"})");
  call(*svc, "POST", "/alarms/zzz/verdict", 404, R"({"decision":"confirmed_attack"})");

  const auto d = call(*svc, "GET", "/alarms/mon:1", 200);
  EXPECT_EQ(d["verdict"]["decided_by"], "officer");
  EXPECT_EQ(svc->read([](const Central& c) { return c.evidence().size(); }), 1u);
}

TEST_F(ServiceTest, RetrainConflictWhileInFlight) {
  auto svc = make_service(OfficerPolicy::Manual);
  svc->on_envelope(alarm_env("hn:1", attack(), AlarmSource::HnMonitor));
  std::promise<void> release;
  auto released = release.get_future().share();
  std::atomic<bool> entered{false};
  svc->set_retrain_gate([&] {
    entered = true;
    released.wait();
  });
  call(*svc, "POST", "/retrain", 202);
  const auto busy = call(*svc, "POST", "/retrain", 409, R"({"force":true})");
  EXPECT_EQ(busy["error"], "Conflict");
  EXPECT_TRUE(call(*svc, "GET", "/metrics", 200)["retrain_in_flight"].get<bool>());
  release.set_value();
  svc->wait_for_retrain();
  EXPECT_TRUE(entered);

  const auto m = call(*svc, "GET", "/metrics", 200);
  EXPECT_EQ(m["model_version"], 2);
  EXPECT_EQ(m["retrains_completed"], 1);
  EXPECT_EQ(m["evidence"], 0);
  EXPECT_FALSE(m["retrain_in_flight"].get<bool>());
  std::lock_guard<std::mutex> lock(sent_mu);
  ASSERT_EQ(sent.size(), 1u);
  EXPECT_EQ(sent[0].type(), MsgType::ModelUpdate);
  EXPECT_EQ(std::get<ModelUpdate>(sent[0].body).version, 2u);
}

TEST_F(ServiceTest, RetrainNeedsEvidenceUnlessForced) {
  auto svc = make_service(OfficerPolicy::Manual);
  const auto err = call(*svc, "POST", "/retrain", 400);
  EXPECT_EQ(err["error"], "NoNewEvidence");
  call(*svc, "POST", "/retrain", 400, "[1,2]");
  call(*svc, "POST", "/retrain", 202, R"({"force":true})");
  svc->wait_for_retrain();
  EXPECT_EQ(call(*svc, "GET", "/model", 200)["version"], 2);
}

TEST_F(ServiceTest, ThresholdStartsRetrainAutomatically) {
  auto svc = make_service(OfficerPolicy::Oracle, 3);
  for (int i = 0; i < 3; ++i) {
    svc->on_envelope(alarm_env("hn:" + std::to_string(i), attack(), AlarmSource::HnMonitor));
  }
  svc->wait_for_retrain();
  EXPECT_EQ(svc->read([](const Central& c) { return c.model_version(); }), 2u);
  EXPECT_EQ(svc->read([](const Central& c) { return c.retrains_completed(); }), 1u);
}

TEST_F(ServiceTest, AutoRetrainCanBeDisabled) {
  auto svc = make_service(OfficerPolicy::Oracle, 1);
  svc->set_auto_retrain(false);
  svc->on_envelope(alarm_env("hn:1", attack(), AlarmSource::HnMonitor));
  svc->wait_for_retrain();
  EXPECT_EQ(svc->read([](const Central& c) { return c.model_version(); }), 1u);
  EXPECT_TRUE(svc->read([](const Central& c) { return c.retrain_scheduled(); }));
}

TEST_F(ServiceTest, ModelNodesAndMetrics) {
  auto svc = make_service(OfficerPolicy::Manual);
  svc->set_report({{"far", 0.1}});
  const auto replies = svc->on_envelope(Envelope{"m1", kProtocolVersion, RegisterBody{"m1", NodeRole::NetLan}});
  ASSERT_EQ(replies.size(), 2u);
  svc->on_envelope(Envelope{"m1", kProtocolVersion, AckBody{"register", 1}});
  svc->on_envelope(Envelope{"h1", kProtocolVersion, RegisterBody{"h1", NodeRole::Honeypot}});

  const auto model = call(*svc, "GET", "/model", 200);
  EXPECT_EQ(model["version"], 1);
  EXPECT_EQ(model["digest"].get<std::string>().size(), 64u);
  EXPECT_TRUE(model["manifest"].is_object());

  const auto nodes = call(*svc, "GET", "/nodes", 200);
  EXPECT_EQ(nodes["base_version"], 1);
  ASSERT_EQ(nodes["nodes"].size(), 2u);
  for (const auto& n : nodes["nodes"]) EXPECT_TRUE(n["current"].get<bool>());

  const auto m = call(*svc, "GET", "/metrics", 200);
  EXPECT_EQ(m["report"]["far"], 0.1);
  EXPECT_EQ(m["alarms_total"], 0);
  call(*svc, "GET", "/nowhere", 404);
  call(*svc, "DELETE", "/alarms", 404);
}

TEST_F(ServiceTest, ServesOverLoopbackHttp) {
  auto svc = make_service(OfficerPolicy::Manual);
  svc->on_envelope(alarm_env("mon:1", attack()));
  HttpServer server(*svc);
  const int port = server.start("127.0.0.1", 0);
  ASSERT_GT(port, 0);

  httplib::Client client("127.0.0.1", port);
  auto list = client.Get("/alarms?status=pending");
  ASSERT_TRUE(list);
  EXPECT_EQ(list->status, 200);
  EXPECT_EQ(json::parse(list->body).size(), 1u);

  auto post = client.Post("/alarms/mon:1/verdict", R"({"decision":"confirmed_attack"})",
                          "application/json");
  ASSERT_TRUE(post);
  EXPECT_EQ(post->status, 200);
  auto again = client.Post("/alarms/mon:1/verdict", R"({"decision":"confirmed_attack"})",
                           "application/json");
  ASSERT_TRUE(again);
  EXPECT_EQ(again->status, 409);
  server.stop();
}

}  // namespace
}  // namespace aids
