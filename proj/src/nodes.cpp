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

#include <algorithm>
#include <array>

#include "aids/errors.hpp"

namespace aids {

// ---------------------------------------------------------------------------
// NetLanMonitor

NetLanMonitor::NetLanMonitor(std::string node_id, std::size_t buffer_cap)
    : node_id_(std::move(node_id)), buffer_cap_(buffer_cap) {}

bool NetLanMonitor::apply_update(const ModelUpdate& update) {
  if (!accepts_update(applied_version(), update)) return false;
  auto art = std::make_shared<ClassifierArtifact>(deserialize(update.artifact_bytes));
  if (art->version != update.version) {
    throw IntegrityError("update announces version " + std::to_string(update.version) +
                         " but carries version " + std::to_string(art->version));
  }
  artifact_ = std::move(art);
  history_.push_back(update.version);
  return true;
}

std::optional<AlarmReport> NetLanMonitor::process(const ConnectionRecord& record,
                                                  std::int64_t timestamp) {
  ++counters_.records_seen;
  if (!artifact_) {
    if (buffer_.size() < buffer_cap_) {
      buffer_.push_back(record);
    } else {
      ++counters_.dropped_no_model;
    }
    return std::nullopt;
  }
  const Prediction p = predict(*artifact_, record);
  if (!p.is_attack()) return std::nullopt;
  AlarmReport a;
  a.alarm_id = node_id_ + ":" + std::to_string(next_seq_++);
  a.source = AlarmSource::NetLan;
  a.node_id = node_id_;
  a.record = record;
  a.score = p.score;
  a.model_version_used = artifact_->version;
  a.timestamp = timestamp;
  a.status = AlarmStatus::Pending;
  ++counters_.alarms_raised;
  return a;
}

std::vector<AlarmReport> NetLanMonitor::flush_buffer(std::int64_t timestamp) {
  std::vector<AlarmReport> out;
  if (!artifact_) return out;
  while (!buffer_.empty()) {
    const ConnectionRecord r = std::move(buffer_.front());
    buffer_.pop_front();
    --counters_.records_seen;  // counted on arrival already
    if (auto a = process(r, timestamp)) out.push_back(std::move(*a));
  }
  return out;
}

const ClassifierArtifact& NetLanMonitor::artifact() const {
  if (!artifact_) throw NotFound("monitor " + node_id_ + " has no model yet");
  return *artifact_;
}

Prediction NetLanMonitor::classify(const ConnectionRecord& record) const {
  return predict(artifact(), record);
}

// ---------------------------------------------------------------------------
// HnMonitor

HnMonitor::HnMonitor(std::string node_id, double p_detect, std::uint64_t seed)
    : node_id_(std::move(node_id)), p_detect_(p_detect), rng_(seed) {
  if (!(p_detect >= 0.0 && p_detect <= 1.0)) throw InvalidConfig("p_detect must lie in [0,1]");
}

std::optional<AlarmReport> HnMonitor::process(const ConnectionRecord& record,
                                              std::int64_t timestamp) {
  ++records_seen_;
  if (!record.label.is_attack() || !rng_.bernoulli(p_detect_)) return std::nullopt;
  AlarmReport a;
  a.alarm_id = node_id_ + ":" + std::to_string(next_seq_++);
  a.source = AlarmSource::HnMonitor;
  a.node_id = node_id_;
  a.record = record;
  a.score = 1.0;
  a.model_version_used = 0;
  a.timestamp = timestamp;
  a.status = AlarmStatus::ConfirmedAttack;
  ++alarms_raised_;
  return a;
}

// ---------------------------------------------------------------------------
// Central

namespace {

constexpr std::array<std::string_view, 4> kPolicyNames = {"oracle", "always_attack",
                                                          "always_false_alarm", "manual"};

}  // namespace

std::string_view to_string(OfficerPolicy p) { return kPolicyNames[static_cast<std::size_t>(p)]; }

OfficerPolicy parse_officer_policy(std::string_view text) {
  for (std::size_t i = 0; i < kPolicyNames.size(); ++i) {
    if (kPolicyNames[i] == text) return static_cast<OfficerPolicy>(i);
  }
  throw ConfigError("officer: unknown policy '" + std::string(text) +
                    "' (oracle, always_attack, always_false_alarm, manual)");
}

ClassifierArtifact run_retrain(const RetrainJob& job) {
  return retrain(job.artifact, job.corpus, job.evidence, job.spec, job.created_at_ms, job.force);
}

Central::Central(CentralConfig config, std::vector<ConnectionRecord> base_corpus,
                 ClassifierArtifact initial)
    : config_(std::move(config)), corpus_(std::move(base_corpus)), artifact_(std::move(initial)) {
  config_.spec.validate();
  current_update_ = ModelUpdate::from_artifact(artifact_);
  log(Envelope{config_.node_id, kProtocolVersion, current_update_});
}

void Central::log(const Envelope& env) {
  trace_.push_back(encode_message(env));
  if (log_) {
    *log_ << trace_.back() << '\n';
    log_->flush();
    if (!*log_) throw IoError("cannot append to central log");
  }
}

void Central::open_log(const std::filesystem::path& path) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  log_ = std::make_unique<std::ofstream>(path, std::ios::app);
  if (!*log_) throw IoError("cannot open central log " + path.string());
  if (fresh) {
    for (const auto& line : trace_) *log_ << line << '\n';
    log_->flush();
  }
}

Central Central::replay(CentralConfig config, std::vector<ConnectionRecord> base_corpus,
                        const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open central log " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return replay(std::move(config), std::move(base_corpus), lines);
}

Central Central::replay(CentralConfig config, std::vector<ConnectionRecord> base_corpus,
                        const std::vector<std::string>& lines) {
  if (lines.empty()) throw ProtocolError("central log is empty");
  const Envelope first = decode_message(lines.front());
  const auto* initial = std::get_if<ModelUpdate>(&first.body);
  if (initial == nullptr) throw ProtocolError("central log must start with a ModelUpdate");
  accepts_update(0, *initial);
  Central c(std::move(config), std::move(base_corpus), deserialize(initial->artifact_bytes));
  c.replaying_ = true;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Envelope env = decode_message(lines[i]);
    switch (env.type()) {
      case MsgType::Register: c.register_node(std::get<RegisterBody>(env.body)); break;
      case MsgType::Ack: c.record_ack(env.sender_id, std::get<AckBody>(env.body)); break;
      case MsgType::Alarm: {
        const auto& a = std::get<AlarmReport>(env.body);
        c.handle_alarm(a, a.timestamp);
        break;
      }
      case MsgType::Verdict: c.apply_verdict(std::get<Verdict>(env.body)); break;
      case MsgType::ModelUpdate: {
        const auto& u = std::get<ModelUpdate>(env.body);
        accepts_update(0, u);
        ClassifierArtifact art = deserialize(u.artifact_bytes);
        if (art.manifest.evidence_folded > c.evidence_.size()) {
          throw ProtocolError("log line " + std::to_string(i + 1) +
                              " folds more evidence than was recorded");
        }
        c.in_flight_ = art.manifest.evidence_folded;
        c.complete_retrain(std::move(art));
        break;
      }
      case MsgType::Error: break;
    }
  }
  c.outbox_.clear();
  c.replaying_ = false;
  return c;
}

void Central::register_node(const RegisterBody& body) {
  if (body.node_id.empty()) throw ProtocolError("node_id must not be empty");
  auto& node = nodes_[body.node_id];
  node.node_id = body.node_id;
  node.role = body.role;
  log(Envelope{body.node_id, kProtocolVersion, body});
}

void Central::record_ack(const std::string& node_id, const AckBody& ack) {
  auto it = nodes_.find(node_id);
  if (it == nodes_.end()) throw NotFound("node " + node_id + " is not registered");
  it->second.applied_version = ack.applied_version;
  log(Envelope{node_id, kProtocolVersion, ack});
}

void Central::add_evidence(const ConnectionRecord& record, Decision decision) {
  evidence_.push_back({record, decision});
}

AlarmOutcome Central::handle_alarm(const AlarmReport& alarm, std::int64_t now) {
  if (auto it = alarms_.find(alarm.alarm_id); it != alarms_.end()) {
    return {it->second.alarm.status, true};
  }
  if (alarm.alarm_id.empty()) throw ProtocolError("alarm_id must not be empty");
  if (alarm.source == AlarmSource::HnMonitor && alarm.status != AlarmStatus::ConfirmedAttack) {
    throw ProtocolError("honeypot alarms must arrive as confirmed_attack");
  }
  if (alarm.source == AlarmSource::NetLan && alarm.status != AlarmStatus::Pending) {
    throw ProtocolError("Net-LAN alarms must arrive as pending");
  }
  order_.push_back(alarm.alarm_id);
  alarms_.emplace(alarm.alarm_id, StoredAlarm{alarm, std::nullopt});
  log(Envelope{alarm.node_id, kProtocolVersion, alarm});

  if (alarm.source == AlarmSource::HnMonitor) {
    add_evidence(alarm.record, Decision::ConfirmedAttack);
    return {AlarmStatus::ConfirmedAttack, false};
  }
  if (!replaying_ && config_.officer != OfficerPolicy::Manual) {
    Verdict v;
    v.alarm_id = alarm.alarm_id;
    v.timestamp = now;
    switch (config_.officer) {
      case OfficerPolicy::Oracle:
        v.decided_by = DecidedBy::Oracle;
        v.decision = alarm.record.label.is_attack() ? Decision::ConfirmedAttack : Decision::FalseAlarm;
        break;
      case OfficerPolicy::AlwaysAttack:
        v.decided_by = DecidedBy::Policy;
        v.decision = Decision::ConfirmedAttack;
        break;
      case OfficerPolicy::AlwaysFalseAlarm:
        v.decided_by = DecidedBy::Policy;
        v.decision = Decision::FalseAlarm;
        break;
      case OfficerPolicy::Manual: break;
    }
    return {apply_verdict(v).alarm.status, false};
  }
  return {AlarmStatus::Pending, false};
}

const StoredAlarm& Central::apply_verdict(const Verdict& verdict) {
  auto it = alarms_.find(verdict.alarm_id);
  if (it == alarms_.end()) throw NotFound("no alarm " + verdict.alarm_id);
  auto& stored = it->second;
  if (stored.alarm.status != AlarmStatus::Pending) {
    throw Conflict("alarm " + verdict.alarm_id + " is already " +
                   std::string(to_string(stored.alarm.status)));
  }
  stored.alarm.status = verdict.decision == Decision::ConfirmedAttack ? AlarmStatus::ConfirmedAttack
                                                                      : AlarmStatus::FalseAlarm;
  stored.verdict = verdict;
  add_evidence(stored.alarm.record, verdict.decision);
  log(Envelope{config_.node_id, kProtocolVersion, verdict});
  return stored;
}

bool Central::retrain_scheduled() const {
  return !in_flight_ && config_.retrain_threshold > 0 &&
         evidence_.size() >= config_.retrain_threshold;
}

RetrainJob Central::begin_retrain(bool force, std::int64_t now) {
  if (in_flight_) throw Conflict("a retrain is already running");
  if (evidence_.empty() && !force) throw NoNewEvidence("no new evidence to retrain on");
  RetrainJob job{artifact_, corpus_, evidence_, config_.spec, force, now};
  in_flight_ = evidence_.size();
  return job;
}

ModelUpdate Central::complete_retrain(ClassifierArtifact result) {
  if (!in_flight_) throw Conflict("no retrain is running");
  const std::size_t folded = *in_flight_;
  if (result.version <= artifact_.version) {
    in_flight_.reset();
    throw Conflict("retrain produced version " + std::to_string(result.version) +
                   ", not newer than " + std::to_string(artifact_.version));
  }
  const std::span<const Evidence> captured(evidence_.data(), folded);
  corpus_ = retrain_corpus(corpus_, captured);
  evidence_.erase(evidence_.begin(), evidence_.begin() + static_cast<std::ptrdiff_t>(folded));
  in_flight_.reset();
  artifact_ = std::move(result);
  current_update_ = ModelUpdate::from_artifact(artifact_);
  ++retrains_completed_;
  const Envelope env{config_.node_id, kProtocolVersion, current_update_};
  log(env);
  outbox_.push_back(env);
  return current_update_;
}

void Central::abort_retrain(const std::string& reason) {
  in_flight_.reset();
  outbox_.push_back(Envelope{config_.node_id, kProtocolVersion, ErrorBody{"RetrainFailed", reason}});
}

ModelUpdate Central::retrain_now(bool force, std::int64_t now) {
  const RetrainJob job = begin_retrain(force, now);
  ClassifierArtifact result;
  try {
    result = run_retrain(job);
  } catch (const std::exception& e) {
    abort_retrain(e.what());
    throw;
  }
  return complete_retrain(std::move(result));
}

std::vector<Envelope> Central::handle_envelope(const Envelope& env, std::int64_t now) {
  std::vector<Envelope> replies;
  const auto ack = [&](std::string ref) {
    replies.push_back(Envelope{config_.node_id, kProtocolVersion, AckBody{std::move(ref), model_version()}});
  };
  try {
    switch (env.type()) {
      case MsgType::Register: {
        const auto& body = std::get<RegisterBody>(env.body);
        register_node(body);
        ack(body.node_id);
        if (body.role == NodeRole::NetLan) {
          replies.push_back(Envelope{config_.node_id, kProtocolVersion, current_update_});
        }
        break;
      }
      case MsgType::Alarm: {
        const auto& alarm = std::get<AlarmReport>(env.body);
        handle_alarm(alarm, now);
        ack(alarm.alarm_id);
        break;
      }
      case MsgType::Verdict: {
        const auto& v = std::get<Verdict>(env.body);
        apply_verdict(v);
        ack(v.alarm_id);
        break;
      }
      case MsgType::Ack: record_ack(env.sender_id, std::get<AckBody>(env.body)); break;
      case MsgType::ModelUpdate:
        throw ProtocolError("Central does not accept model updates");
      case MsgType::Error: break;
    }
  } catch (const aids::Error& e) {
    replies.push_back(error_envelope(config_.node_id, e));
  }
  return replies;
}

std::vector<Envelope> Central::take_outbox() {
  std::vector<Envelope> out;
  out.swap(outbox_);
  return out;
}

std::vector<StoredAlarm> Central::alarms() const {
  std::vector<StoredAlarm> out;
  out.reserve(order_.size());
  for (const auto& id : order_) out.push_back(alarms_.at(id));
  return out;
}

const StoredAlarm& Central::find_alarm(const std::string& alarm_id) const {
  auto it = alarms_.find(alarm_id);
  if (it == alarms_.end()) throw NotFound("no alarm " + alarm_id);
  return it->second;
}

std::vector<RegisteredNode> Central::nodes() const {
  std::vector<RegisteredNode> out;
  for (const auto& [id, node] : nodes_) out.push_back(node);
  return out;
}

std::size_t Central::pending_alarms() const {
  return static_cast<std::size_t>(std::count_if(alarms_.begin(), alarms_.end(), [](const auto& kv) {
    return kv.second.alarm.status == AlarmStatus::Pending;
  }));
}

CentralSnapshot Central::snapshot() const {
  CentralSnapshot s;
  s.alarms = alarms();
  s.evidence = evidence_;
  s.corpus_digest = corpus_digest(corpus_);
  s.corpus_size = corpus_.size();
  s.model_version = artifact_.version;
  s.artifact_digest = current_update_.digest;
  s.nodes = nodes();
  s.retrains_completed = retrains_completed_;
  return s;
}

}  // namespace aids
