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
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aids/classifier.hpp"
#include "aids/nodes.hpp"

namespace aids {

// ---------------------------------------------------------------------------
// Synthetic traffic

/// Generator for a small KDD-shaped world with well separated classes:
/// normal http/smtp/domain_u/ftp_data traffic and smurf, neptune, satan,
/// ipsweep and guess_passwd attacks. Phase-two scenarios hold some of these
/// out of training to stand in for new traffic.
struct SyntheticSpec {
  std::size_t per_class = 40;
  /// Label names ("normal:<service>" for a normal service) to generate;
  /// empty means every class.
  std::vector<std::string> classes;
};

std::vector<std::string> synthetic_classes();
std::vector<ConnectionRecord> synthetic_traffic(const SyntheticSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Scenario configuration

enum class Phase { One, Two };
std::string_view to_string(Phase p);

struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  Phase phase = Phase::One;

  /// KDD files. Both empty selects synthetic traffic.
  std::filesystem::path train_path;
  std::filesystem::path stream_path;
  /// Stratified subsample sizes; 0 keeps everything.
  std::size_t train_sample = 0;
  std::size_t stream_sample = 0;
  SyntheticSpec synthetic;

  TrainSpec spec;
  std::size_t monitors = 1;
  /// Share of ground-truth attack records also delivered to the honeypot.
  double honeypot_fraction = 0.0;
  double p_detect = 1.0;
  OfficerPolicy officer = OfficerPolicy::Oracle;
  std::size_t retrain_threshold = 8;
  std::size_t probe_size = 100;

  /// Phase two: attack names and normal services withheld from training.
  std::vector<std::string> holdout_attacks;
  std::vector<std::string> holdout_services;

  bool synthetic_data() const { return train_path.empty() && stream_path.empty(); }
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses the TOML-style scenario text: `[section]` headers, `key = value`
/// lines, `#` comments; values are quoted strings, numbers, booleans or
/// flat arrays. Relative paths resolve against `base_dir`.
/// Throws ConfigError naming the field.
ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Metrics

/// Ground truth and prediction for one replayed record.
struct Outcome {
  Label label;
  bool predicted_attack = false;

  bool operator==(const Outcome&) const = default;
};

struct AttackRow {
  std::string name;
  std::size_t vectors = 0;
  std::size_t detected = 0;
  bool is_new = false;

  /// detected / vectors; absent when there are no vectors.
  std::optional<double> detection_rate() const;
  bool operator==(const AttackRow&) const = default;
};

struct MetricsReport {
  /// Attack names sorted, known and new.
  std::vector<AttackRow> rows;
  std::size_t normal_vectors = 0;
  std::size_t false_alarms = 0;
  std::uint64_t model_version = 0;

  std::size_t known_vectors() const;
  std::size_t known_detected() const;
  std::size_t new_vectors() const;
  std::size_t new_detected() const;
  std::size_t not_detected() const;
  std::optional<double> known_rate() const;
  std::optional<double> new_rate() const;
  std::optional<double> false_alarm_rate() const;
  const AttackRow* row(std::string_view name) const;

  bool operator==(const MetricsReport&) const = default;
};

/// Per-name detection, new/known partition against `training_names`, and
/// FAR over the normal records.
MetricsReport compute_metrics(std::span<const Outcome> outcomes,
                              const std::set<std::string>& training_names,
                              std::uint64_t model_version);

/// Predicts every record with `artifact`.
std::vector<Outcome> replay_stream(const ClassifierArtifact& artifact,
                                   std::span<const ConnectionRecord> stream);

enum class ReportFormat { Text, Csv };
std::string render_report(const MetricsReport& report, ReportFormat format);
/// Inverse of the CSV rendering. Throws MalformedRecord.
MetricsReport parse_report_csv(std::string_view csv);
/// Throws IoError when the file cannot be written.
void emit_report(const MetricsReport& report, ReportFormat format,
                 const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Scenario runs

struct InvariantCheck {
  std::string name;
  bool held = true;
  std::string detail;  // first violation

  bool operator==(const InvariantCheck&) const = default;
};

struct ScenarioResult {
  MetricsReport before;
  MetricsReport after;
  /// Central's event log lines, identical to central.log.
  std::vector<std::string> trace;
  std::vector<InvariantCheck> invariants;
  std::size_t retrains = 0;
  std::uint64_t final_version = 0;
  std::vector<std::uint64_t> monitor_versions;
  /// Largest |score_monitor - score_base| over the probe set after the last
  /// broadcast.
  double probe_max_deviation = 0.0;
  std::size_t netlan_alarms = 0;
  std::size_t honeypot_alarms = 0;
  /// Evidence still waiting for a retrain when the stream ended.
  std::size_t evidence_unfolded = 0;
  CentralSnapshot central;
  ClassifierArtifact final_model;

  bool all_invariants_held() const;
};

/// The training corpus and stream a scenario uses, holdouts applied.
struct ScenarioData {
  std::vector<ConnectionRecord> train;
  std::vector<ConnectionRecord> stream;
};
ScenarioData load_scenario_data(const ScenarioConfig& config);

/// Trains Base, streams every record to the monitors (round robin) and
/// routes a seeded share of attacks to the honeypot, retraining and
/// broadcasting whenever Central schedules it. The stream is measured
/// against the initial and the final Base model. Deterministic in
/// (config, seed).
ScenarioResult run_scenario(const ScenarioConfig& config);
ScenarioResult run_scenario(const ScenarioConfig& config, const ScenarioData& data);

void write_trace(const std::filesystem::path& path, std::span<const std::string> trace);

}  // namespace aids
