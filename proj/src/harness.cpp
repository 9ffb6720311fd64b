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

#include <algorithm>
#include <cmath>
#include <fstream>

#include "aids/errors.hpp"
#include "aids/harness.hpp"
#include "aids/rng.hpp"

namespace aids {

namespace {

class Checks {
 public:
  explicit Checks(std::vector<std::string> names) {
    for (auto& n : names) checks_.push_back({std::move(n), true, {}});
  }
  void violate(std::size_t i, const std::string& detail) {
    if (checks_[i].held) checks_[i].detail = detail;
    checks_[i].held = false;
  }
  std::vector<InvariantCheck> take() { return std::move(checks_); }

 private:
  std::vector<InvariantCheck> checks_;
};

enum CheckId : std::size_t {
  kNoNormalAlarm, kMonotoneVersions, kEvidenceLearned, kProbeConvergence, kMessagesAccepted,
  kRetrainsSucceeded,
};

}  // namespace

bool ScenarioResult::all_invariants_held() const {
  return std::all_of(invariants.begin(), invariants.end(), [](const auto& c) { return c.held; });
}

ScenarioData load_scenario_data(const ScenarioConfig& config) {
  ScenarioData data;
  if (config.synthetic_data()) {
    data.train = synthetic_traffic(config.synthetic, config.seed);
    data.stream = synthetic_traffic(config.synthetic, config.seed + 1);
  } else {
    const auto& tax = default_taxonomy();
    data.train = load_kdd_file(config.train_path, tax);
    data.stream = load_kdd_file(config.stream_path, tax);
    if (config.train_sample > 0) data.train = stratified_sample(data.train, config.train_sample, config.seed);
    if (config.stream_sample > 0) {
      data.stream = stratified_sample(data.stream, config.stream_sample, config.seed + 1);
    }
  }
  const auto held_out = [&](const ConnectionRecord& r) {
    const auto& names = config.holdout_attacks;
    const auto& services = config.holdout_services;
    if (r.label.is_attack()) return std::find(names.begin(), names.end(), r.label.attack_name) != names.end();
    return std::find(services.begin(), services.end(), r.service) != services.end();
  };
  std::erase_if(data.train, held_out);
  return data;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  return run_scenario(config, load_scenario_data(config));
}

ScenarioResult run_scenario(const ScenarioConfig& config, const ScenarioData& data) {
  config.validate();
  std::int64_t tick = 0;
  const auto now = [&] { return ++tick; };

  ScenarioResult result;
  Checks checks({"no alarm from a Normal prediction", "model versions only increase",
                 "confirmed evidence predicted Attack after retrain",
                 "monitors match Base on the probe set", "Central accepted every message",
                 "every retrain succeeded"});

  const auto names = label_names(data.train);
  const std::set<std::string> training_names(names.begin(), names.end());
  ClassifierArtifact base = train(config.spec, data.train, 0);

  CentralConfig cc;
  cc.officer = config.officer;
  cc.retrain_threshold = config.retrain_threshold;
  cc.spec = config.spec;
  Central central(cc, data.train, base);

  std::vector<NetLanMonitor> monitors;
  for (std::size_t i = 0; i < config.monitors; ++i) monitors.emplace_back("netlan-" + std::to_string(i + 1));
  HnMonitor honeypot("honeypot", config.p_detect, config.seed ^ 0x5bd1e995u);
  Rng routing(config.seed ^ 0x9e3779b97f4a7c15ull);
  const auto probe = stratified_sample(data.stream, config.probe_size, config.seed);

  const auto deliver = [&](Envelope env) {
    auto replies = central.handle_envelope(env, now());
    for (const auto& r : replies) {
      if (r.type() == MsgType::Error) checks.violate(kMessagesAccepted, std::get<ErrorBody>(r.body).message);
    }
    return replies;
  };
  const auto apply = [&](NetLanMonitor& mon, const ModelUpdate& update) {
    const auto before = mon.applied_version();
    if (mon.apply_update(update)) {
      if (mon.applied_version() <= before) checks.violate(kMonotoneVersions, mon.node_id());
      deliver({mon.node_id(), kProtocolVersion, AckBody{"model", update.version}});
    }
  };

  for (auto& mon : monitors) {
    for (const auto& r : deliver({mon.node_id(), kProtocolVersion, RegisterBody{mon.node_id(), NodeRole::NetLan}})) {
      if (const auto* u = std::get_if<ModelUpdate>(&r.body)) apply(mon, *u);
    }
  }
  deliver({honeypot.node_id(), kProtocolVersion, RegisterBody{honeypot.node_id(), NodeRole::Honeypot}});

  result.before = compute_metrics(replay_stream(base, data.stream), training_names, base.version);

  bool retrain_broken = false;
  const auto retrain_cycle = [&] {
    RetrainJob job = central.begin_retrain(false, now());
    ClassifierArtifact fresh;
    try {
      fresh = run_retrain(job);
    } catch (const aids::Error& e) {
      central.abort_retrain(e.what());
      checks.violate(kRetrainsSucceeded, e.what());
      retrain_broken = true;
      return;
    }
    const auto previous = central.model_version();
    central.complete_retrain(std::move(fresh));
    ++result.retrains;
    if (central.model_version() <= previous) checks.violate(kMonotoneVersions, "central");
    const auto& model = central.artifact();
    for (const auto& ev : job.evidence) {
      if (ev.decision == Decision::ConfirmedAttack && !predict(model, ev.record).is_attack()) {
        checks.violate(kEvidenceLearned, "version " + std::to_string(model.version) + ": " +
                                             render_kdd_line(ev.record));
      }
    }
    for (const auto& env : central.take_outbox()) {
      if (const auto* u = std::get_if<ModelUpdate>(&env.body)) {
        for (auto& mon : monitors) apply(mon, *u);
      }
    }
    double deviation = 0.0;
    for (const auto& mon : monitors) {
      if (mon.applied_version() != model.version) {
        checks.violate(kProbeConvergence, mon.node_id() + " did not apply version " +
                                              std::to_string(model.version));
      }
      for (const auto& r : probe) {
        const auto a = mon.classify(r);
        const auto b = predict(model, r);
        deviation = std::max(deviation, std::abs(a.score - b.score));
        if (!(a == b)) checks.violate(kProbeConvergence, mon.node_id() + " differs from Base");
      }
    }
    result.probe_max_deviation = deviation;
  };

  for (std::size_t i = 0; i < data.stream.size(); ++i) {
    const auto& record = data.stream[i];
    auto& mon = monitors[i % monitors.size()];
    if (auto alarm = mon.process(record, now())) {
      ++result.netlan_alarms;
      if (!mon.classify(record).is_attack()) checks.violate(kNoNormalAlarm, alarm->alarm_id);
      deliver({mon.node_id(), kProtocolVersion, *alarm});
    }
    if (record.label.is_attack() && routing.bernoulli(config.honeypot_fraction)) {
      if (auto alarm = honeypot.process(record, now())) {
        ++result.honeypot_alarms;
        deliver({honeypot.node_id(), kProtocolVersion, *alarm});
      }
    }
    while (!retrain_broken && central.retrain_scheduled()) retrain_cycle();
  }

  const auto& final_model = central.artifact();
  result.after = compute_metrics(replay_stream(final_model, data.stream), training_names,
                                 final_model.version);
  result.final_version = final_model.version;
  for (const auto& mon : monitors) result.monitor_versions.push_back(mon.applied_version());
  result.evidence_unfolded = central.evidence().size();
  result.trace = central.trace();
  result.central = central.snapshot();
  result.final_model = final_model;
  result.invariants = checks.take();
  return result;
}

void write_trace(const std::filesystem::path& path, std::span<const std::string> trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& line : trace) out << line << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace aids
