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

#include "aids/protocol.hpp"

#include <array>
#include <cmath>

#include "aids/errors.hpp"

namespace aids {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 6> kMsgNames = {"Register",    "Alarm", "Verdict",
                                                       "ModelUpdate", "Ack",   "Error"};

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<std::string_view, N>& names,
                std::string_view what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == text) return static_cast<Enum>(i);
  }
  throw ProtocolError("unknown " + std::string(what) + " '" + std::string(text) + "'");
}

constexpr std::array<std::string_view, 2> kSourceNames = {"netlan", "hn_monitor"};
constexpr std::array<std::string_view, 3> kStatusNames = {"pending", "confirmed_attack",
                                                          "false_alarm"};
constexpr std::array<std::string_view, 3> kDecidedNames = {"officer", "oracle", "policy"};
constexpr std::array<std::string_view, 2> kRoleNames = {"netlan", "honeypot"};
constexpr std::array<std::string_view, 2> kDecisionNames = {"confirmed_attack", "false_alarm"};

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw ProtocolError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw ProtocolError(std::string("missing field '") + key + "'");
  return *it;
}

std::string text_field(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) throw ProtocolError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double real_field(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number()) throw ProtocolError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t unsigned_field(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_unsigned()) {
    throw ProtocolError(std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::int64_t integer_field(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_integer()) throw ProtocolError(std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

json body_to_json(const RegisterBody& b) {
  return {{"node_id", b.node_id}, {"role", to_string(b.role)}};
}
json body_to_json(const AlarmReport& a) { return alarm_to_json(a); }
json body_to_json(const Verdict& v) { return verdict_to_json(v); }
json body_to_json(const ModelUpdate& u) {
  return {{"version", u.version},
          {"artifact_bytes", base64_encode(u.artifact_bytes)},
          {"digest", u.digest}};
}
json body_to_json(const AckBody& a) { return {{"ref", a.ref}, {"applied_version", a.applied_version}}; }
json body_to_json(const ErrorBody& e) { return {{"code", e.code}, {"message", e.message}}; }

MessageBody body_from_json(MsgType type, const json& j) {
  switch (type) {
    case MsgType::Register:
      return RegisterBody{text_field(j, "node_id"),
                          parse_enum<NodeRole>(text_field(j, "role"), kRoleNames, "role")};
    case MsgType::Alarm: return alarm_from_json(j);
    case MsgType::Verdict: {
      Verdict v;
      v.alarm_id = text_field(j, "alarm_id");
      v.decision = parse_decision(text_field(j, "decision"));
      v.decided_by = parse_enum<DecidedBy>(text_field(j, "decided_by"), kDecidedNames, "decided_by");
      v.timestamp = integer_field(j, "timestamp");
      return v;
    }
    case MsgType::ModelUpdate: {
      ModelUpdate u;
      u.version = unsigned_field(j, "version");
      u.artifact_bytes = base64_decode(text_field(j, "artifact_bytes"));
      u.digest = text_field(j, "digest");
      return u;
    }
    case MsgType::Ack: return AckBody{text_field(j, "ref"), unsigned_field(j, "applied_version")};
    case MsgType::Error: return ErrorBody{text_field(j, "code"), text_field(j, "message")};
  }
  throw ProtocolError("unreachable message type");
}

}  // namespace

std::string_view to_string(MsgType t) { return kMsgNames[static_cast<std::size_t>(t)]; }
std::string_view to_string(AlarmSource s) { return kSourceNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(AlarmStatus s) { return kStatusNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(DecidedBy d) { return kDecidedNames[static_cast<std::size_t>(d)]; }
std::string_view to_string(NodeRole r) { return kRoleNames[static_cast<std::size_t>(r)]; }
std::string_view to_string(Decision d) { return kDecisionNames[static_cast<std::size_t>(d)]; }

AlarmStatus parse_alarm_status(std::string_view text) {
  return parse_enum<AlarmStatus>(text, kStatusNames, "status");
}

Decision parse_decision(std::string_view text) {
  return parse_enum<Decision>(text, kDecisionNames, "decision");
}

ModelUpdate ModelUpdate::from_artifact(const ClassifierArtifact& artifact) {
  ModelUpdate u;
  u.version = artifact.version;
  u.artifact_bytes = serialize(artifact);
  u.digest = sha256_hex(u.artifact_bytes);
  return u;
}

json record_to_json(const ConnectionRecord& record) {
  json features = json::array();
  for (std::size_t c = 0; c < kNumFeatures; ++c) {
    if (kFeatureSchema[c].kind == FeatureKind::Symbolic) {
      features.push_back(record.symbol(c - 1));
    } else {
      features.push_back(record.numeric(c));
    }
  }
  return {{"features", std::move(features)},
          {"label", record.label.name()},
          {"category", to_string(record.label.category)}};
}

ConnectionRecord record_from_json(const json& j) {
  const auto& features = field(j, "features");
  if (!features.is_array() || features.size() != kNumFeatures) {
    throw ProtocolError("record must carry exactly " + std::to_string(kNumFeatures) + " features");
  }
  ConnectionRecord r;
  for (std::size_t c = 0; c < kNumFeatures; ++c) {
    const auto& v = features[c];
    if (kFeatureSchema[c].kind == FeatureKind::Symbolic) {
      if (!v.is_string()) throw ProtocolError(std::string(kFeatureSchema[c].name) + " must be a string");
      r.symbol(c - 1) = v.get<std::string>();
    } else {
      if (!v.is_number()) throw ProtocolError(std::string(kFeatureSchema[c].name) + " must be a number");
      r.numeric(c) = v.get<double>();
    }
  }
  const std::string label = text_field(j, "label");
  if (label == "normal") {
    r.label = Label::normal();
  } else if (label.empty()) {
    throw ProtocolError("empty label");
  } else {
    r.label = Label::attack(label, parse_category(text_field(j, "category")));
  }
  return r;
}

json alarm_to_json(const AlarmReport& a) {
  return {{"alarm_id", a.alarm_id},
          {"source", to_string(a.source)},
          {"node_id", a.node_id},
          {"record", record_to_json(a.record)},
          {"score", a.score},
          {"model_version_used", a.model_version_used},
          {"timestamp", a.timestamp},
          {"status", to_string(a.status)}};
}

AlarmReport alarm_from_json(const json& j) {
  AlarmReport a;
  a.alarm_id = text_field(j, "alarm_id");
  if (a.alarm_id.empty()) throw ProtocolError("empty alarm_id");
  a.source = parse_enum<AlarmSource>(text_field(j, "source"), kSourceNames, "source");
  a.node_id = text_field(j, "node_id");
  a.record = record_from_json(field(j, "record"));
  a.score = real_field(j, "score");
  a.model_version_used = unsigned_field(j, "model_version_used");
  a.timestamp = integer_field(j, "timestamp");
  a.status = parse_alarm_status(text_field(j, "status"));
  return a;
}

json verdict_to_json(const Verdict& v) {
  return {{"alarm_id", v.alarm_id},
          {"decision", to_string(v.decision)},
          {"decided_by", to_string(v.decided_by)},
          {"timestamp", v.timestamp}};
}

std::string encode_message(const Envelope& env) {
  json j = {{"msg_type", to_string(env.type())},
            {"sender_id", env.sender_id},
            {"protocol_version", env.protocol_version},
            {"payload", std::visit([](const auto& b) { return body_to_json(b); }, env.body)}};
  try {
    // Control characters, including newlines, are escaped by the encoder.
    return j.dump(-1, ' ', false, json::error_handler_t::strict);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("cannot encode message: ") + e.what());
  }
}

Envelope decode_message(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed message: ") + e.what());
  }
  const std::string type_name = text_field(j, "msg_type");
  MsgType type{};
  bool known = false;
  for (std::size_t i = 0; i < kMsgNames.size(); ++i) {
    if (kMsgNames[i] == type_name) {
      type = static_cast<MsgType>(i);
      known = true;
    }
  }
  if (!known) throw UnknownMessage("unknown msg_type '" + type_name + "'");

  Envelope env;
  env.sender_id = text_field(j, "sender_id");
  const auto& pv = field(j, "protocol_version");
  if (!pv.is_number_integer() || pv.get<std::int64_t>() != kProtocolVersion) {
    throw ProtocolError("unsupported protocol_version " + pv.dump());
  }
  env.protocol_version = kProtocolVersion;
  try {
    env.body = body_from_json(type, field(j, "payload"));
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("bad payload: ") + e.what());
  }
  return env;
}

Envelope error_envelope(const std::string& sender_id, const aids::Error& error) {
  return Envelope{sender_id, kProtocolVersion, ErrorBody{error.kind(), error.what()}};
}

bool accepts_update(std::uint64_t current_version, const ModelUpdate& update) {
  if (sha256_hex(update.artifact_bytes) != update.digest) {
    throw IntegrityError("model update " + std::to_string(update.version) +
                         " does not match its digest");
  }
  return update.version > current_version;
}

}  // namespace aids
