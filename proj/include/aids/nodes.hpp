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

#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aids/classifier.hpp"
#include "aids/protocol.hpp"
#include "aids/rng.hpp"

namespace aids {

/// Classifies a traffic stream with the latest applied artifact and raises
/// Pending alarms for records predicted Attack.
class NetLanMonitor {
 public:
  struct Counters {
    std::size_t records_seen = 0;
    std::size_t alarms_raised = 0;
    std::size_t dropped_no_model = 0;

    bool operator==(const Counters&) const = default;
  };

  explicit NetLanMonitor(std::string node_id, std::size_t buffer_cap = 10000);

  const std::string& node_id() const { return node_id_; }

  /// Verifies and installs the update. Returns false for a stale or repeated
  /// version. Throws IntegrityError or CorruptArtifact and keeps the current
  /// model when the update is bad.
  bool apply_update(const ModelUpdate& update);

  /// Alarm for an Attack prediction, nothing for Normal. Without a model the
  /// record is buffered (or dropped once the buffer is full).
  std::optional<AlarmReport> process(const ConnectionRecord& record, std::int64_t timestamp);

  /// Classifies records buffered before the first model arrived.
  std::vector<AlarmReport> flush_buffer(std::int64_t timestamp);

  bool has_model() const { return artifact_ != nullptr; }
  std::uint64_t applied_version() const { return artifact_ ? artifact_->version : 0; }
  /// Every version applied, in order.
  const std::vector<std::uint64_t>& version_history() const { return history_; }
  const ClassifierArtifact& artifact() const;
  Prediction classify(const ConnectionRecord& record) const;
  const Counters& counters() const { return counters_; }
  std::size_t buffered() const { return buffer_.size(); }

 private:
  std::string node_id_;
  std::size_t buffer_cap_;
  std::shared_ptr<const ClassifierArtifact> artifact_;
  std::vector<std::uint64_t> history_;
  std::deque<ConnectionRecord> buffer_;
  Counters counters_;
  std::uint64_t next_seq_ = 1;
};

/// Honeypot audit detector: every record it sees is suspect, and genuine
/// attacks are caught with probability p_detect.
class HnMonitor {
 public:
  HnMonitor(std::string node_id, double p_detect, std::uint64_t seed);

  const std::string& node_id() const { return node_id_; }
  std::optional<AlarmReport> process(const ConnectionRecord& record, std::int64_t timestamp);
  std::size_t records_seen() const { return records_seen_; }
  std::size_t alarms_raised() const { return alarms_raised_; }

 private:
  std::string node_id_;
  double p_detect_;
  Rng rng_;
  std::size_t records_seen_ = 0;
  std::size_t alarms_raised_ = 0;
  std::uint64_t next_seq_ = 1;
};

enum class OfficerPolicy { Oracle, AlwaysAttack, AlwaysFalseAlarm, Manual };
std::string_view to_string(OfficerPolicy p);
/// Throws ConfigError on unknown text.
OfficerPolicy parse_officer_policy(std::string_view text);

struct CentralConfig {
  std::string node_id = "central";
  OfficerPolicy officer = OfficerPolicy::Manual;
  /// Undecided evidence count that schedules a retrain.
  std::size_t retrain_threshold = 8;
  TrainSpec spec;
};

struct StoredAlarm {
  AlarmReport alarm;
  std::optional<Verdict> verdict;

  bool operator==(const StoredAlarm&) const = default;
};

struct RegisteredNode {
  std::string node_id;
  NodeRole role = NodeRole::NetLan;
  std::uint64_t applied_version = 0;

  bool operator==(const RegisteredNode&) const = default;
};

/// Inputs captured when a retrain starts; the training itself can then run
/// without access to Central.
struct RetrainJob {
  ClassifierArtifact artifact;
  std::vector<ConnectionRecord> corpus;
  std::vector<Evidence> evidence;
  TrainSpec spec;
  bool force = false;
  std::int64_t created_at_ms = 0;
};

/// retrain(job.artifact, job.corpus, job.evidence, ...).
ClassifierArtifact run_retrain(const RetrainJob& job);

/// Comparable summary of everything Central persists.
struct CentralSnapshot {
  std::vector<StoredAlarm> alarms;
  std::vector<Evidence> evidence;
  std::string corpus_digest;
  std::size_t corpus_size = 0;
  std::uint64_t model_version = 0;
  std::string artifact_digest;
  std::vector<RegisteredNode> nodes;
  std::size_t retrains_completed = 0;

  bool operator==(const CentralSnapshot&) const = default;
};

struct AlarmOutcome {
  AlarmStatus status = AlarmStatus::Pending;
  bool duplicate = false;
};

/// Collects alarms, turns decisions into evidence and retrains the Base
/// classifier. Not thread-safe; CentralService serialises access.
class Central {
 public:
  Central(CentralConfig config, std::vector<ConnectionRecord> base_corpus,
          ClassifierArtifact initial);

  /// Appends every state-changing event to `path` from now on. A new or
  /// empty file first receives the current model as a ModelUpdate line.
  void open_log(const std::filesystem::path& path);

  /// Rebuilds Central from an event log. Policies are not re-run: the
  /// logged verdicts are applied as recorded.
  static Central replay(CentralConfig config, std::vector<ConnectionRecord> base_corpus,
                        const std::filesystem::path& path);
  static Central replay(CentralConfig config, std::vector<ConnectionRecord> base_corpus,
                        const std::vector<std::string>& lines);

  void register_node(const RegisterBody& body);
  void record_ack(const std::string& node_id, const AckBody& ack);

  /// Stores the alarm (deduped by alarm_id). H&N alarms become evidence at
  /// once; Net-LAN alarms wait for a verdict unless a policy decides now.
  AlarmOutcome handle_alarm(const AlarmReport& alarm, std::int64_t now);

  /// Throws NotFound for an unknown alarm and Conflict if already decided.
  const StoredAlarm& apply_verdict(const Verdict& verdict);

  /// Threshold reached and no retrain running.
  bool retrain_scheduled() const;
  bool retrain_in_flight() const { return in_flight_.has_value(); }

  /// Captures the current evidence for training. Throws Conflict while a
  /// retrain runs and NoNewEvidence for empty evidence unless forced.
  RetrainJob begin_retrain(bool force, std::int64_t now);
  /// Installs the result, folds the captured evidence into the corpus and
  /// queues the ModelUpdate broadcast.
  ModelUpdate complete_retrain(ClassifierArtifact result);
  /// Drops the in-flight job; evidence stays for the next attempt.
  void abort_retrain(const std::string& reason);
  /// begin_retrain, run_retrain, complete_retrain.
  ModelUpdate retrain_now(bool force, std::int64_t now);

  /// Dispatches an inbound envelope; returns the replies to send back.
  std::vector<Envelope> handle_envelope(const Envelope& env, std::int64_t now);
  /// Broadcasts queued since the last call.
  std::vector<Envelope> take_outbox();

  const CentralConfig& config() const { return config_; }
  const ClassifierArtifact& artifact() const { return artifact_; }
  std::uint64_t model_version() const { return artifact_.version; }
  const ModelUpdate& current_update() const { return current_update_; }
  const std::vector<ConnectionRecord>& corpus() const { return corpus_; }
  const std::vector<Evidence>& evidence() const { return evidence_; }
  /// Alarms in arrival order.
  std::vector<StoredAlarm> alarms() const;
  const StoredAlarm& find_alarm(const std::string& alarm_id) const;
  std::vector<RegisteredNode> nodes() const;
  std::size_t retrains_completed() const { return retrains_completed_; }
  std::size_t pending_alarms() const;
  /// Every logged event as wire lines, in order.
  const std::vector<std::string>& trace() const { return trace_; }
  CentralSnapshot snapshot() const;

 private:
  void log(const Envelope& env);
  void add_evidence(const ConnectionRecord& record, Decision decision);

  CentralConfig config_;
  std::vector<ConnectionRecord> corpus_;
  ClassifierArtifact artifact_;
  ModelUpdate current_update_;
  std::vector<std::string> order_;
  std::map<std::string, StoredAlarm> alarms_;
  std::vector<Evidence> evidence_;
  std::map<std::string, RegisteredNode> nodes_;
  std::optional<std::size_t> in_flight_;  // evidence captured by the running job
  std::size_t retrains_completed_ = 0;
  bool replaying_ = false;
  std::vector<std::string> trace_;
  std::unique_ptr<std::ofstream> log_;
  std::vector<Envelope> outbox_;
};

}  // namespace aids
