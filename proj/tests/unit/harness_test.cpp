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

#include "aids/harness.hpp"

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "aids/errors.hpp"
#include "aids/rng.hpp"

namespace aids {
namespace {

std::string error_of(std::string_view text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ScenarioParse, FullFile) {
  const auto c = parse_scenario(R"(
# adaptation run
name = "toy"
seed = 11
phase = "two"   # trailing comment

[synthetic]
per_class = 12
classes = ["normal:http", "smurf", "guess_passwd"]

[classifier]
kind = "mlp"
hidden_sizes = [4, 8]
trainer = "lm"
epochs = 50
C = 10.0
kernel = "linear"

[nodes]
monitors = 3
honeypot_fraction = 0.5
p_detect = 0.75
officer = "always_attack"
retrain_threshold = 2
probe_size = 20

[holdout]
attacks = ["guess_passwd"]
services = ["ftp_data"]
)");
  EXPECT_EQ(c.name, "toy");
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.phase, Phase::Two);
  EXPECT_TRUE(c.synthetic_data());
  EXPECT_EQ(c.synthetic.per_class, 12u);
  EXPECT_EQ(c.synthetic.classes.size(), 3u);
  EXPECT_EQ(c.spec.kind, ClassifierKind::Mlp);
  EXPECT_EQ(c.spec.hidden_size_grid, (std::vector<std::size_t>{4, 8}));
  EXPECT_EQ(c.spec.trainer, TrainerKind::Lm);
  EXPECT_EQ(c.spec.lm.max_epochs, 50u);
  EXPECT_EQ(c.spec.rprop.max_epochs, 50u);
  EXPECT_EQ(c.spec.smo.C, 10.0);
  EXPECT_EQ(c.spec.smo.kernel.type, KernelType::Linear);
  EXPECT_EQ(c.monitors, 3u);
  EXPECT_EQ(c.honeypot_fraction, 0.5);
  EXPECT_EQ(c.p_detect, 0.75);
  EXPECT_EQ(c.officer, OfficerPolicy::AlwaysAttack);
  EXPECT_EQ(c.retrain_threshold, 2u);
  EXPECT_EQ(c.probe_size, 20u);
  EXPECT_EQ(c.holdout_attacks, std::vector<std::string>{"guess_passwd"});
  EXPECT_EQ(c.holdout_services, std::vector<std::string>{"ftp_data"});
}

TEST(ScenarioParse, EmptyTextGivesDefaults) {
  const auto c = parse_scenario("");
  EXPECT_EQ(c.officer, OfficerPolicy::Oracle);
  EXPECT_EQ(c.retrain_threshold, 8u);
  EXPECT_EQ(c.monitors, 1u);
  EXPECT_EQ(c.phase, Phase::One);
}

TEST(ScenarioParse, ErrorsNameTheField) {
  EXPECT_NE(error_of("[nodes]\np_detect = 1.5").find("nodes.p_detect"), std::string::npos);
  EXPECT_NE(error_of("[nodes]\nhoneypot_fraction = -0.1").find("nodes.honeypot_fraction"),
            std::string::npos);
  EXPECT_NE(error_of("[nodes]\nmonitors = 0").find("nodes.monitors"), std::string::npos);
  EXPECT_NE(error_of("[nodes]\nmonitors = many").find("nodes.monitors"), std::string::npos);
  EXPECT_NE(error_of("[nodes]\nofficer = \"robot\"").find("nodes.officer"), std::string::npos);
  EXPECT_NE(error_of("[nodes]\nretrain_treshold = 3").find("nodes.retrain_treshold"),
            std::string::npos);
  EXPECT_NE(error_of("name = toy").find("name"), std::string::npos);
  EXPECT_NE(error_of("phase = \"three\"").find("phase"), std::string::npos);
  EXPECT_NE(error_of("[holdout]\nattacks = [\"smurf\"]").find("phase"), std::string::npos);
  EXPECT_NE(error_of("[classifier]\nC = -1").find("classifier"), std::string::npos);
  EXPECT_NE(error_of("[synthetic]\nclasses = [\"normal:gopher\"]").find("synthetic.classes"),
            std::string::npos);
  EXPECT_NE(error_of("[data]\ntrain = \"/no/such/file\"\nstream = \"/no/such/file\"").find("data.train"),
            std::string::npos);
  EXPECT_NE(error_of("[data]\ntrain = \"/etc/hostname\"").find("data.stream"), std::string::npos);
  EXPECT_NE(error_of("seed = 1\nseed = 2").find("seed"), std::string::npos);
  EXPECT_NE(error_of("just words").find("line 1"), std::string::npos);
}

TEST(ScenarioParse, RelativePathsUseBaseDir) {
  const auto dir = std::filesystem::temp_directory_path() / "aids_scenario_test";
  std::filesystem::create_directories(dir);
  for (const char* f : {"a.txt", "b.txt"}) std::ofstream(dir / f) << "";
  const auto c = parse_scenario("[data]\ntrain = \"a.txt\"\nstream = \"b.txt\"", dir);
  EXPECT_EQ(c.train_path, dir / "a.txt");
  EXPECT_FALSE(c.synthetic_data());
  std::filesystem::remove_all(dir);
}

TEST(Synthetic, DeterministicAndLabelled) {
  const SyntheticSpec spec{5, {}};
  const auto a = synthetic_traffic(spec, 3);
  EXPECT_EQ(a, synthetic_traffic(spec, 3));
  EXPECT_NE(a, synthetic_traffic(spec, 4));
  ASSERT_EQ(a.size(), 5 * synthetic_classes().size());
  std::size_t normals = 0;
  for (const auto& r : a) normals += r.label.is_attack() ? 0 : 1;
  EXPECT_EQ(normals, 5u * 4u);
  EXPECT_EQ(a[4].label.attack_name, "smurf");
  EXPECT_EQ(a[4].label.category, AttackCategory::DoS);
  // Every record survives the KDD text form.
  for (const auto& r : a) EXPECT_EQ(parse_kdd_line(render_kdd_line(r), default_taxonomy()), r);
}

Outcome outcome(const std::string& name, bool attack_predicted) {
  return {default_taxonomy().label_for(name), attack_predicted};
}

TEST(Metrics, NewAttackAggregate) {
  std::vector<Outcome> v;
  for (int i = 0; i < 18729; ++i) v.push_back(outcome("mailbomb", i < 3502));
  const auto m = compute_metrics(v, {"normal", "smurf"}, 1);
  ASSERT_TRUE(m.new_rate());
  EXPECT_NEAR(*m.new_rate() * 100.0, 18.7, 0.05);
  EXPECT_FALSE(m.known_rate());
  EXPECT_EQ(m.not_detected(), 18729u - 3502u);
}

TEST(Metrics, ZeroVectorsMeansAbsentRate) {
  const auto m = compute_metrics(std::vector<Outcome>{}, {}, 3);
  EXPECT_TRUE(m.rows.empty());
  EXPECT_FALSE(m.known_rate());
  EXPECT_FALSE(m.new_rate());
  EXPECT_FALSE(m.false_alarm_rate());
  EXPECT_FALSE((AttackRow{"x", 0, 0, false}.detection_rate()));
}

TEST(Metrics, FalseAlarmRate) {
  std::vector<Outcome> v(10, outcome("normal", false));
  EXPECT_EQ(compute_metrics(v, {"normal"}, 1).false_alarm_rate(), 0.0);
  v[0].predicted_attack = v[1].predicted_attack = true;
  EXPECT_EQ(compute_metrics(v, {"normal"}, 1).false_alarm_rate(), 0.2);
}

TEST(Metrics, PartitionIdentityHolds) {
  Rng rng(5);
  const std::vector<std::string> names = {"normal", "smurf", "neptune", "satan", "mailbomb", "apache2"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Outcome> v;
    std::size_t detected = 0;
    for (int i = 0; i < 200; ++i) {
      auto o = outcome(names[rng.index(names.size())], rng.bernoulli(0.6));
      if (o.label.is_attack() && o.predicted_attack) ++detected;
      v.push_back(o);
    }
    const auto m = compute_metrics(v, {"normal", "smurf", "neptune"}, 1);
    const double total = m.known_rate().value_or(0) * static_cast<double>(m.known_vectors()) +
                         m.new_rate().value_or(0) * static_cast<double>(m.new_vectors());
    EXPECT_NEAR(total, static_cast<double>(detected), 1e-9);
    EXPECT_EQ(m.known_detected() + m.new_detected(), detected);
    for (const auto& row : m.rows) EXPECT_EQ(row.is_new, row.name == "satan" || row.name == "mailbomb" || row.name == "apache2");
  }
}

MetricsReport random_report(Rng& rng) {
  MetricsReport m;
  const std::vector<std::string> names = {"back", "ipsweep", "mailbomb", "neptune", "smurf"};
  for (const auto& n : names) {
    if (rng.bernoulli(0.3)) continue;
    const auto vectors = rng.index(1000);
    m.rows.push_back({n, vectors, vectors == 0 ? 0 : rng.index(vectors + 1), rng.bernoulli(0.5)});
  }
  m.normal_vectors = rng.index(5000);
  m.false_alarms = m.normal_vectors == 0 ? 0 : rng.index(m.normal_vectors + 1);
  m.model_version = 1 + rng.index(20);
  return m;
}

TEST(Report, CsvRoundTrip) {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const auto m = random_report(rng);
    const auto csv = render_report(m, ReportFormat::Csv);
    EXPECT_EQ(parse_report_csv(csv), m);
    EXPECT_EQ(render_report(parse_report_csv(csv), ReportFormat::Csv), csv);
  }
}

TEST(Report, TextHasSumOfNewAttacksRow) {
  MetricsReport m;
  m.rows = {{"mailbomb", 10, 2, true}, {"smurf", 50, 49, false}};
  m.normal_vectors = 100;
  m.false_alarms = 3;
  m.model_version = 2;
  const auto text = render_report(m, ReportFormat::Text);
  EXPECT_NE(text.find("Sum of new attacks                  10         2               20.00"),
            std::string::npos)
      << text;
  EXPECT_NE(text.find("Model version 2"), std::string::npos);
  EXPECT_EQ(text, render_report(m, ReportFormat::Text));
  EXPECT_NE(render_report(m, ReportFormat::Csv).find("sum_new,Sum of new attacks,10,2,20.00,2"),
            std::string::npos);
}

TEST(Report, EmptyPerNameSection) {
  MetricsReport m;
  m.normal_vectors = 4;
  const auto text = render_report(m, ReportFormat::Text);
  EXPECT_NE(text.find("Sum of new attacks"), std::string::npos);
  EXPECT_NE(text.find("False alarms"), std::string::npos);
  EXPECT_EQ(parse_report_csv(render_report(m, ReportFormat::Csv)), m);
}

TEST(Report, MalformedCsv) {
  EXPECT_THROW(parse_report_csv("nope\n"), MalformedRecord);
  EXPECT_THROW(parse_report_csv("row,name,vectors,detected,rate_pct,model_version\nknown,a,1,1,,1\n"),
               MalformedRecord);
  EXPECT_THROW(parse_report_csv("row,name,vectors,detected,rate_pct,model_version\n"
                                "known,a,x,1,,1\n"),
               MalformedRecord);
}

TEST(Report, UnwritablePath) {
  EXPECT_THROW(emit_report(MetricsReport{}, ReportFormat::Text, "/no/such/dir/report.txt"), IoError);
}

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.seed = 3;
  c.synthetic.per_class = 12;
  c.spec.smo.C = 10.0;
  c.monitors = 2;
  c.probe_size = 40;
  return c;
}

TEST(Scenario, IdenticalRunsGiveIdenticalTraces) {
  auto c = small_config();
  c.phase = Phase::Two;
  c.holdout_attacks = {"guess_passwd"};
  c.honeypot_fraction = 0.5;
  c.retrain_threshold = 3;
  const auto a = run_scenario(c);
  const auto b = run_scenario(c);
  EXPECT_GT(a.retrains, 0u);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.before, b.before);
  EXPECT_EQ(a.after, b.after);
  EXPECT_EQ(a.central, b.central);
}

TEST(Scenario, NoAlarmsMeansNoAdaptation) {
  auto c = small_config();
  auto data = load_scenario_data(c);
  std::erase_if(data.stream, [](const auto& r) { return r.label.is_attack() || r.service == "ftp_data"; });
  const auto r = run_scenario(c, data);
  EXPECT_EQ(r.netlan_alarms, 0u);
  EXPECT_EQ(r.retrains, 0u);
  EXPECT_EQ(r.after, r.before);
  EXPECT_TRUE(r.all_invariants_held());
}

TEST(Scenario, HeldOutAttackIsLearnedFromHoneypot) {
  auto c = small_config();
  c.phase = Phase::Two;
  c.holdout_attacks = {"guess_passwd"};
  c.honeypot_fraction = 1.0;
  c.retrain_threshold = 1;
  const auto r = run_scenario(c);
  for (const auto& check : r.invariants) EXPECT_TRUE(check.held) << check.name << ": " << check.detail;
  const auto* before = r.before.row("guess_passwd");
  const auto* after = r.after.row("guess_passwd");
  ASSERT_TRUE(before && after);
  EXPECT_TRUE(before->is_new);
  EXPECT_LE(*before->detection_rate(), 0.5);
  EXPECT_EQ(after->detected, after->vectors);
  for (auto v : r.monitor_versions) EXPECT_EQ(v, r.final_version);
  EXPECT_EQ(r.probe_max_deviation, 0.0);
}

TEST(Scenario, HeldOutServiceFalseAlarmsAreUnlearned) {
  auto c = small_config();
  c.phase = Phase::Two;
  c.holdout_services = {"ftp_data"};
  c.retrain_threshold = 1;
  const auto data = load_scenario_data(c);
  for (const auto& rec : data.train) EXPECT_NE(rec.service, "ftp_data");
  const auto r = run_scenario(c, data);
  EXPECT_TRUE(r.all_invariants_held());
  EXPECT_GT(r.before.false_alarms, 0u);
  EXPECT_EQ(r.after.false_alarms, 0u);
}

TEST(Scenario, ManualOfficerLeavesAlarmsPending) {
  auto c = small_config();
  c.officer = OfficerPolicy::Manual;
  const auto r = run_scenario(c);
  EXPECT_GT(r.netlan_alarms, 0u);
  EXPECT_EQ(r.retrains, 0u);
  EXPECT_EQ(r.central.evidence.size(), 0u);
  for (const auto& a : r.central.alarms) EXPECT_EQ(a.alarm.status, AlarmStatus::Pending);
}

TEST(Scenario, TraceReplaysToFinalState) {
  auto c = small_config();
  c.phase = Phase::Two;
  c.holdout_attacks = {"guess_passwd"};
  c.honeypot_fraction = 1.0;
  c.retrain_threshold = 4;
  const auto data = load_scenario_data(c);
  const auto r = run_scenario(c, data);
  CentralConfig cc;
  cc.officer = c.officer;
  cc.retrain_threshold = c.retrain_threshold;
  cc.spec = c.spec;
  const auto replayed = Central::replay(cc, data.train, r.trace);
  EXPECT_EQ(replayed.snapshot(), r.central);
}

}  // namespace
}  // namespace aids
