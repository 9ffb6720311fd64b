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
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "aids/classifier.hpp"
#include "aids/dataset.hpp"
#include "aids/digest.hpp"
#include "aids/errors.hpp"

namespace aids {

inline constexpr int kProtocolVersion = 1;

enum class MsgType { Register, Alarm, Verdict, ModelUpdate, Ack, Error };
enum class AlarmSource { NetLan, HnMonitor };
enum class AlarmStatus { Pending, ConfirmedAttack, FalseAlarm };
enum class DecidedBy { Officer, Oracle, Policy };
enum class NodeRole { NetLan, Honeypot };

std::string_view to_string(MsgType t);
std::string_view to_string(AlarmSource s);
std::string_view to_string(AlarmStatus s);
std::string_view to_string(DecidedBy d);
std::string_view to_string(NodeRole r);
std::string_view to_string(Decision d);

/// Inverse of to_string; throw ProtocolError on unknown text.
AlarmStatus parse_alarm_status(std::string_view text);
Decision parse_decision(std::string_view text);

struct RegisterBody {
  std::string node_id;
  NodeRole role = NodeRole::NetLan;

  bool operator==(const RegisterBody&) const = default;
};

struct AlarmReport {
  std::string alarm_id;
  AlarmSource source = AlarmSource::NetLan;
  std::string node_id;
  ConnectionRecord record;
  double score = 0.0;
  std::uint64_t model_version_used = 0;
  std::int64_t timestamp = 0;
  AlarmStatus status = AlarmStatus::Pending;

  bool operator==(const AlarmReport&) const = default;
};

struct Verdict {
  std::string alarm_id;
  Decision decision = Decision::ConfirmedAttack;
  DecidedBy decided_by = DecidedBy::Officer;
  std::int64_t timestamp = 0;

  bool operator==(const Verdict&) const = default;
};

struct ModelUpdate {
  std::uint64_t version = 0;
  Bytes artifact_bytes;
  std::string digest;  // sha256_hex(artifact_bytes)

  static ModelUpdate from_artifact(const ClassifierArtifact& artifact);
  bool operator==(const ModelUpdate&) const = default;
};

struct AckBody {
  std::string ref;
  std::uint64_t applied_version = 0;

  bool operator==(const AckBody&) const = default;
};

struct ErrorBody {
  std::string code;
  std::string message;

  bool operator==(const ErrorBody&) const = default;
};

using MessageBody =
    std::variant<RegisterBody, AlarmReport, Verdict, ModelUpdate, AckBody, ErrorBody>;

struct Envelope {
  std::string sender_id;
  int protocol_version = kProtocolVersion;
  MessageBody body;

  MsgType type() const { return static_cast<MsgType>(body.index()); }
  bool operator==(const Envelope&) const = default;
};

/// One JSON object, no trailing newline and no raw newline inside.
std::string encode_message(const Envelope& env);
/// Throws UnknownMessage for an unrecognised msg_type and ProtocolError for
/// malformed JSON, schema violations or an unsupported protocol_version.
Envelope decode_message(std::string_view line);

/// Error envelope answering a failed decode or request.
Envelope error_envelope(const std::string& sender_id, const aids::Error& error);

/// {"features": [41 values in schema order], "label": name, "category": c}.
nlohmann::json record_to_json(const ConnectionRecord& record);
/// Throws ProtocolError on schema violations.
ConnectionRecord record_from_json(const nlohmann::json& j);

nlohmann::json alarm_to_json(const AlarmReport& alarm);
AlarmReport alarm_from_json(const nlohmann::json& j);
nlohmann::json verdict_to_json(const Verdict& verdict);

/// True iff the update is newer than `current_version`. Throws IntegrityError
/// when the digest does not match the bytes.
bool accepts_update(std::uint64_t current_version, const ModelUpdate& update);

}  // namespace aids
