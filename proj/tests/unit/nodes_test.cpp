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

#include "aids/nodes.hpp"

#include <filesystem>
#include <set>

#include <gtest/gtest.h>

#include "aids/errors.hpp"
#include "test_support.hpp"

namespace aids {
namespace {

using testing::make_record;
using testing::toy_corpus;

class NodesTest : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus = toy_corpus(20, 1);
    artifact = train(TrainSpec{}, corpus, 0);
    update = ModelUpdate::from_artifact(artifact);
  }

  Central make_central(OfficerPolicy officer, std::size_t k = 8) {
    CentralConfig cfg;
    cfg.officer = officer;
    cfg.retrain_threshold = k;
    cfg.spec.smo.C = 100.0;
    return Central(cfg, corpus, artifact);
  }

  static ConnectionRecord attack() { return make_record("icmp", "ecr_i", "SF", 1000, "smurf"); }
  static ConnectionRecord normal() { return make_record("tcp", "http", "SF", 300); }

  AlarmReport netlan_alarm(const std::string& id, const ConnectionRecord& r) {
    AlarmReport a;
    a.alarm_id = id;
    a.node_id = "mon";
    a.record = r;
    a.score = 0.9;
    a.model_version_used = 1;
    return a;
  }

  AlarmReport hn_alarm(const std::string& id, const ConnectionRecord& r) {
    auto a = netlan_alarm(id, r);
    a.source = AlarmSource::HnMonitor;
    a.status = AlarmStatus::ConfirmedAttack;
    return a;
  }

  std::vector<ConnectionRecord> corpus;
  ClassifierArtifact artifact;
  ModelUpdate update;
};

TEST_F(NodesTest, MonitorBuffersUntilModelArrives) {
  NetLanMonitor mon("m1", 2);
  EXPECT_FALSE(mon.process(attack(), 0));
  EXPECT_FALSE(mon.process(normal(), 0));
  EXPECT_FALSE(mon.process(attack(), 0));
  EXPECT_EQ(mon.buffered(), 2u);
  EXPECT_EQ(mon.counters().dropped_no_model, 1u);
  EXPECT_THROW(mon.artifact(), NotFound);
  ASSERT_TRUE(mon.apply_update(update));
  const auto alarms = mon.flush_buffer(5);
  ASSERT_EQ(alarms.size(), 1u);
  EXPECT_EQ(alarms[0].record, attack());
  EXPECT_EQ(mon.counters().records_seen, 3u);
  EXPECT_EQ(mon.buffered(), 0u);
}

TEST_F(NodesTest, MonitorAlarmsOnlyOnAttackPredictions) {
  NetLanMonitor mon("m1");
  mon.apply_update(update);
  EXPECT_FALSE(mon.process(normal(), 1));
  const auto a = mon.process(attack(), 2);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->status, AlarmStatus::Pending);
  EXPECT_EQ(a->source, AlarmSource::NetLan);
  EXPECT_EQ(a->record, attack());
  EXPECT_EQ(a->model_version_used, 1u);
  EXPECT_EQ(a->score, predict(artifact, attack()).score);
  EXPECT_EQ(a->timestamp, 2);
}

TEST_F(NodesTest, IdenticalRecordsGetDistinctAlarmIds) {
  NetLanMonitor mon("m1");
  mon.apply_update(update);
  std::set<std::string> ids;
  for (int i = 0; i < 3; ++i) ids.insert(mon.process(attack(), i)->alarm_id);
  EXPECT_EQ(ids.size(), 3u);
}

TEST_F(NodesTest, MonitorUpdateRules) {
  NetLanMonitor mon("m1");
  EXPECT_TRUE(mon.apply_update(update));
  EXPECT_FALSE(mon.apply_update(update));
  auto bad = ModelUpdate::from_artifact(retrain(artifact, corpus, {}, TrainSpec{}, 0, true));
  bad.artifact_bytes.back() ^= 1;
  EXPECT_THROW(mon.apply_update(bad), IntegrityError);
  EXPECT_EQ(mon.applied_version(), 1u);
  auto lying = update;
  lying.version = 7;
  EXPECT_THROW(mon.apply_update(lying), IntegrityError);
  EXPECT_EQ(mon.version_history(), std::vector<std::uint64_t>{1});
}

TEST_F(NodesTest, HoneypotDetection) {
  HnMonitor sure("hp", 1.0, 1), blind("hp", 0.0, 1);
  const auto a = sure.process(attack(), 3);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->status, AlarmStatus::ConfirmedAttack);
  EXPECT_EQ(a->source, AlarmSource::HnMonitor);
  EXPECT_FALSE(blind.process(attack(), 3));
  for (double p : {0.0, 0.5, 1.0}) {
    HnMonitor hp("hp", p, 2);
    for (int i = 0; i < 50; ++i) EXPECT_FALSE(hp.process(normal(), i));
  }
  EXPECT_THROW(HnMonitor("hp", 1.5, 0), InvalidConfig);
}

TEST_F(NodesTest, HoneypotRateFollowsProbability) {
  HnMonitor hp("hp", 0.3, 9);
  int hits = 0;
  for (int i = 0; i < 4000; ++i) hits += hp.process(attack(), i).has_value();
  EXPECT_NEAR(hits / 4000.0, 0.3, 0.03);
}

TEST_F(NodesTest, HoneypotAlarmBecomesEvidence) {
  auto c = make_central(OfficerPolicy::Manual);
  EXPECT_EQ(c.handle_alarm(hn_alarm("hp:1", attack()), 0).status, AlarmStatus::ConfirmedAttack);
  ASSERT_EQ(c.evidence().size(), 1u);
  EXPECT_EQ(c.evidence()[0].decision, Decision::ConfirmedAttack);
  EXPECT_THROW(c.apply_verdict({"hp:1", Decision::FalseAlarm, DecidedBy::Officer, 1}), Conflict);
}

TEST_F(NodesTest, ManualAlarmStaysPending) {
  auto c = make_central(OfficerPolicy::Manual);
  EXPECT_EQ(c.handle_alarm(netlan_alarm("m:1", attack()), 0).status, AlarmStatus::Pending);
  EXPECT_EQ(c.pending_alarms(), 1u);
  EXPECT_TRUE(c.evidence().empty());
}

TEST_F(NodesTest, OraclePolicyMarksNormalAsFalseAlarm) {
  auto c = make_central(OfficerPolicy::Oracle);
  EXPECT_EQ(c.handle_alarm(netlan_alarm("m:1", normal()), 0).status, AlarmStatus::FalseAlarm);
  EXPECT_EQ(c.handle_alarm(netlan_alarm("m:2", attack()), 0).status, AlarmStatus::ConfirmedAttack);
  ASSERT_EQ(c.evidence().size(), 2u);
  EXPECT_EQ(c.evidence()[0].decision, Decision::FalseAlarm);
  EXPECT_EQ(c.find_alarm("m:1").verdict->decided_by, DecidedBy::Oracle);
}

TEST_F(NodesTest, FixedPolicies) {
  auto yes = make_central(OfficerPolicy::AlwaysAttack);
  auto no = make_central(OfficerPolicy::AlwaysFalseAlarm);
  EXPECT_EQ(yes.handle_alarm(netlan_alarm("m:1", normal()), 0).status, AlarmStatus::ConfirmedAttack);
  EXPECT_EQ(no.handle_alarm(netlan_alarm("m:1", attack()), 0).status, AlarmStatus::FalseAlarm);
  EXPECT_EQ(no.find_alarm("m:1").verdict->decided_by, DecidedBy::Policy);
}

TEST_F(NodesTest, VerdictRules) {
  auto c = make_central(OfficerPolicy::Manual);
  c.handle_alarm(netlan_alarm("m:1", normal()), 0);
  const auto& s = c.apply_verdict({"m:1", Decision::FalseAlarm, DecidedBy::Officer, 4});
  EXPECT_EQ(s.alarm.status, AlarmStatus::FalseAlarm);
  EXPECT_EQ(c.evidence().size(), 1u);
  EXPECT_THROW(c.apply_verdict({"m:1", Decision::ConfirmedAttack, DecidedBy::Officer, 5}), Conflict);
  EXPECT_THROW(c.apply_verdict({"m:9", Decision::ConfirmedAttack, DecidedBy::Officer, 5}), NotFound);
  EXPECT_EQ(c.evidence().size(), 1u);
}

TEST_F(NodesTest, ThresholdSchedulesRetrainOnce) {
  auto c = make_central(OfficerPolicy::Manual, 3);
  for (int i = 1; i <= 4; ++i) c.handle_alarm(netlan_alarm("m:" + std::to_string(i), attack()), 0);
  c.apply_verdict({"m:1", Decision::ConfirmedAttack, DecidedBy::Officer, 0});
  c.apply_verdict({"m:2", Decision::ConfirmedAttack, DecidedBy::Officer, 0});
  EXPECT_FALSE(c.retrain_scheduled());
  c.apply_verdict({"m:3", Decision::ConfirmedAttack, DecidedBy::Officer, 0});
  EXPECT_TRUE(c.retrain_scheduled());
  const auto job = c.begin_retrain(false, 10);
  EXPECT_FALSE(c.retrain_scheduled());
  EXPECT_THROW(c.begin_retrain(true, 10), Conflict);
  c.apply_verdict({"m:4", Decision::ConfirmedAttack, DecidedBy::Officer, 0});
  EXPECT_FALSE(c.retrain_scheduled());
  c.complete_retrain(run_retrain(job));
  EXPECT_EQ(c.evidence().size(), 1u);  // arrived while training
  EXPECT_EQ(c.corpus().size(), corpus.size() + 3);
  EXPECT_FALSE(c.retrain_scheduled());
}

TEST_F(NodesTest, DuplicateAlarmChangesStateOnce) {
  auto c = make_central(OfficerPolicy::Oracle);
  const auto a = netlan_alarm("m:1", attack());
  c.handle_alarm(a, 0);
  const auto once = c.snapshot();
  const auto trace_len = c.trace().size();
  EXPECT_TRUE(c.handle_alarm(a, 0).duplicate);
  EXPECT_EQ(c.snapshot(), once);
  EXPECT_EQ(c.trace().size(), trace_len);
}

TEST_F(NodesTest, RetrainBroadcastConvergesMonitors) {
  auto c = make_central(OfficerPolicy::Oracle, 1);
  std::vector<NetLanMonitor> mons;
  for (int i = 0; i < 3; ++i) {
    mons.emplace_back("m" + std::to_string(i));
    c.register_node({mons.back().node_id(), NodeRole::NetLan});
    mons.back().apply_update(c.current_update());
  }
  // A web-looking attack the initial model misses.
  auto sneaky = make_record("tcp", "http", "SF", 350, "back");
  sneaky.numeric(9) = 30;
  for (int i = 0; i < 5; ++i) {
    auto r = sneaky;
    r.numeric(4) += i;
    c.handle_alarm(hn_alarm("hp:" + std::to_string(i), r), i);
  }
  ASSERT_TRUE(c.retrain_scheduled());
  const auto u = c.retrain_now(false, 100);
  EXPECT_EQ(u.version, 2u);
  const auto out = c.take_outbox();
  ASSERT_EQ(out.size(), 1u);
  const auto wire = decode_message(encode_message(out[0]));
  const auto& broadcast = std::get<ModelUpdate>(wire.body);
  for (auto& m : mons) {
    ASSERT_TRUE(m.apply_update(broadcast));
    c.record_ack(m.node_id(), {"v2", m.applied_version()});
  }
  for (const auto& n : c.nodes()) EXPECT_EQ(n.applied_version, c.model_version());
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto probe = testing::random_record(rng);
    const auto base = predict(c.artifact(), probe);
    for (const auto& m : mons) ASSERT_EQ(m.classify(probe), base);
  }
  EXPECT_TRUE(predict(c.artifact(), sneaky).is_attack());
}

TEST_F(NodesTest, ForcedRetrainWithoutEvidence) {
  auto c = make_central(OfficerPolicy::Manual);
  EXPECT_THROW(c.retrain_now(false, 0), NoNewEvidence);
  c.retrain_now(true, 0);
  EXPECT_EQ(c.model_version(), 2u);
  EXPECT_EQ(c.corpus(), corpus);
}

TEST_F(NodesTest, AbortedRetrainKeepsEvidence) {
  auto c = make_central(OfficerPolicy::Oracle);
  c.handle_alarm(netlan_alarm("m:1", attack()), 0);
  c.begin_retrain(false, 0);
  c.abort_retrain("disk full");
  EXPECT_FALSE(c.retrain_in_flight());
  EXPECT_EQ(c.evidence().size(), 1u);
  EXPECT_EQ(c.model_version(), 1u);
  const auto out = c.take_outbox();
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].type(), MsgType::Error);
}

TEST_F(NodesTest, EnvelopeDispatch) {
  auto c = make_central(OfficerPolicy::Manual);
  auto replies = c.handle_envelope({"m1", kProtocolVersion, RegisterBody{"m1", NodeRole::NetLan}}, 0);
  ASSERT_EQ(replies.size(), 2u);
  EXPECT_EQ(replies[1].type(), MsgType::ModelUpdate);
  replies = c.handle_envelope({"m1", kProtocolVersion, netlan_alarm("m1:1", attack())}, 0);
  ASSERT_EQ(replies.size(), 1u);
  EXPECT_EQ(std::get<AckBody>(replies[0].body).ref, "m1:1");
  replies = c.handle_envelope({"x", kProtocolVersion, Verdict{"nope", Decision::FalseAlarm, DecidedBy::Officer, 0}}, 0);
  ASSERT_EQ(replies.size(), 1u);
  EXPECT_EQ(std::get<ErrorBody>(replies[0].body).code, "NotFound");
  replies = c.handle_envelope({"x", kProtocolVersion, update}, 0);
  EXPECT_EQ(std::get<ErrorBody>(replies[0].body).code, "ProtocolError");
}

TEST_F(NodesTest, LogReplayReconstructsState) {
  const auto path = std::filesystem::temp_directory_path() / "aids_nodes_central.log";
  std::filesystem::remove(path);
  CentralConfig cfg;
  cfg.officer = OfficerPolicy::Oracle;
  cfg.retrain_threshold = 2;
  Central live(cfg, corpus, artifact);
  live.open_log(path);
  live.register_node({"m1", NodeRole::NetLan});
  live.register_node({"hp", NodeRole::Honeypot});
  live.handle_alarm(netlan_alarm("m1:1", normal()), 1);
  live.handle_alarm(hn_alarm("hp:1", attack()), 2);
  live.retrain_now(false, 3);
  live.record_ack("m1", {"v2", 2});
  live.handle_alarm(netlan_alarm("m1:2", attack()), 4);
  const auto job = live.begin_retrain(false, 5);
  live.handle_alarm(hn_alarm("hp:2", attack()), 6);  // lands mid-retrain
  live.complete_retrain(run_retrain(job));

  const auto replayed = Central::replay(cfg, corpus, path);
  EXPECT_EQ(replayed.snapshot(), live.snapshot());
  EXPECT_EQ(replayed.trace(), live.trace());
  EXPECT_EQ(replayed.evidence().size(), 1u);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace aids
