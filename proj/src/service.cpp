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

#include <chrono>

#include "aids/errors.hpp"

namespace aids {

namespace {

using nlohmann::json;

json alarm_row(const StoredAlarm& s) {
  const auto& a = s.alarm;
  return {{"alarm_id", a.alarm_id},
          {"source", to_string(a.source)},
          {"node_id", a.node_id},
          {"timestamp", a.timestamp},
          {"score", a.score},
          {"model_version_used", a.model_version_used},
          {"status", to_string(a.status)}};
}

json alarm_detail(const StoredAlarm& s) {
  json j = alarm_row(s);
  j["record"] = record_to_json(s.alarm.record);
  json names = json::array();
  for (const auto& f : kFeatureSchema) names.push_back(f.name);
  j["feature_names"] = std::move(names);
  j["verdict"] = s.verdict ? verdict_to_json(*s.verdict) : json(nullptr);
  return j;
}

HttpResponse reply(int status, const json& body) { return {status, body.dump()}; }

HttpResponse error_reply(int status, std::string_view kind, std::string_view message) {
  return reply(status, {{"error", kind}, {"message", message}});
}

int status_for(const aids::Error& e) {
  if (e.kind() == "NotFound") return 404;
  if (e.kind() == "Conflict") return 409;
  return 400;
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start < path.size()) {
    auto end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    if (end > start) parts.push_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

}  // namespace

std::int64_t wall_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

CentralService::CentralService(Central central, Clock clock)
    : central_(std::move(central)), clock_(std::move(clock)) {}

CentralService::~CentralService() {
  wait_for_retrain();
  if (worker_.joinable()) worker_.join();
}

void CentralService::set_broadcast(Broadcast fn) {
  std::lock_guard<std::mutex> lock(mu_);
  broadcast_ = std::move(fn);
}

void CentralService::set_auto_retrain(bool on) {
  std::lock_guard<std::mutex> lock(mu_);
  auto_retrain_ = on;
}

void CentralService::set_retrain_gate(std::function<void()> gate) {
  std::lock_guard<std::mutex> lock(mu_);
  gate_ = std::move(gate);
}

void CentralService::set_report(nlohmann::json report) {
  std::lock_guard<std::mutex> lock(mu_);
  report_ = std::move(report);
}

std::vector<Envelope> CentralService::on_envelope(const Envelope& env) {
  std::lock_guard<std::mutex> lock(mu_);
  auto replies = central_.handle_envelope(env, clock_());
  maybe_auto_retrain_locked();
  return replies;
}

void CentralService::maybe_auto_retrain_locked() {
  if (auto_retrain_ && !retrain_running_ && central_.retrain_scheduled()) {
    start_retrain_locked(false);
  }
}

void CentralService::start_retrain(bool force) {
  std::lock_guard<std::mutex> lock(mu_);
  start_retrain_locked(force);
}

void CentralService::start_retrain_locked(bool force) {
  if (retrain_running_) throw Conflict("a retrain is already running");
  RetrainJob job = central_.begin_retrain(force, clock_());
  if (worker_.joinable()) worker_.join();  // previous worker has already finished
  retrain_running_ = true;
  worker_ = std::thread(&CentralService::retrain_worker, this, std::move(job));
}

void CentralService::retrain_worker(RetrainJob job) {
  for (;;) {
    std::function<void()> gate;
    {
      std::lock_guard<std::mutex> lock(mu_);
      gate = gate_;
    }
    if (gate) gate();
    std::optional<ClassifierArtifact> result;
    std::string error;
    try {
      result = run_retrain(job);
    } catch (const std::exception& e) {
      error = e.what();
    }
    std::vector<Envelope> outbox;
    bool again = false;
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (result) {
        try {
          central_.complete_retrain(std::move(*result));
          last_retrain_error_.clear();
        } catch (const std::exception& e) {
          last_retrain_error_ = e.what();
        }
      } else {
        central_.abort_retrain(error);
        last_retrain_error_ = error;
      }
      outbox = central_.take_outbox();
      if (result && auto_retrain_ && central_.retrain_scheduled()) {
        job = central_.begin_retrain(false, clock_());
        again = true;
      }
    }
    publish(std::move(outbox));
    if (again) continue;
    {
      std::lock_guard<std::mutex> lock(mu_);
      retrain_running_ = false;
    }
    idle_cv_.notify_all();
    return;
  }
}

void CentralService::publish(std::vector<Envelope> outbox) {
  Broadcast fn;
  {
    std::lock_guard<std::mutex> lock(mu_);
    fn = broadcast_;
  }
  if (!fn) return;
  for (const auto& env : outbox) fn(env);
}

void CentralService::wait_for_retrain() {
  std::unique_lock<std::mutex> lock(mu_);
  idle_cv_.wait(lock, [this] { return !retrain_running_; });
}

json CentralService::metrics_locked() const {
  std::size_t pending = 0, confirmed = 0, false_alarms = 0;
  const auto alarms = central_.alarms();
  for (const auto& s : alarms) {
    switch (s.alarm.status) {
      case AlarmStatus::Pending: ++pending; break;
      case AlarmStatus::ConfirmedAttack: ++confirmed; break;
      case AlarmStatus::FalseAlarm: ++false_alarms; break;
    }
  }
  return {{"model_version", central_.model_version()},
          {"alarms_total", alarms.size()},
          {"pending", pending},
          {"confirmed_attack", confirmed},
          {"false_alarm", false_alarms},
          {"evidence", central_.evidence().size()},
          {"corpus_size", central_.corpus().size()},
          {"retrains_completed", central_.retrains_completed()},
          {"retrain_in_flight", retrain_running_},
          {"last_retrain_error", last_retrain_error_},
          {"report", report_}};
}

HttpResponse CentralService::handle_http(std::string_view method, std::string_view path,
                                         const std::map<std::string, std::string>& query,
                                         std::string_view body) {
  const auto parts = split_path(path);
  try {
    std::lock_guard<std::mutex> lock(mu_);
    if (parts.size() == 1 && parts[0] == "alarms" && method == "GET") {
      std::optional<AlarmStatus> filter;
      if (auto it = query.find("status"); it != query.end() && !it->second.empty()) {
        filter = parse_alarm_status(it->second);
      }
      json rows = json::array();
      for (const auto& s : central_.alarms()) {
        if (!filter || s.alarm.status == *filter) rows.push_back(alarm_row(s));
      }
      return reply(200, rows);
    }
    if (parts.size() == 2 && parts[0] == "alarms" && method == "GET") {
      return reply(200, alarm_detail(central_.find_alarm(std::string(parts[1]))));
    }
    if (parts.size() == 3 && parts[0] == "alarms" && parts[2] == "verdict" && method == "POST") {
      json req;
      try {
        req = json::parse(body);
      } catch (const json::parse_error&) {
        return error_reply(400, "ProtocolError", "body must be a JSON object");
      }
      if (!req.is_object() || !req.contains("decision") || !req["decision"].is_string()) {
        return error_reply(400, "ProtocolError", "body needs a string 'decision'");
      }
      Verdict v;
      v.alarm_id = std::string(parts[1]);
      v.decision = parse_decision(req["decision"].get<std::string>());
      v.decided_by = DecidedBy::Officer;
      v.timestamp = clock_();
      const json row = alarm_row(central_.apply_verdict(v));
      maybe_auto_retrain_locked();
      return reply(200, row);
    }
    if (parts.size() == 1 && parts[0] == "retrain" && method == "POST") {
      bool force = false;
      if (!body.empty()) {
        const json req = json::parse(body, nullptr, false);
        if (req.is_discarded() || !req.is_object()) {
          return error_reply(400, "ProtocolError", "body must be a JSON object");
        }
        force = req.value("force", false);
      }
      start_retrain_locked(force);
      return reply(202, {{"status", "started"}, {"from_version", central_.model_version()}});
    }
    if (parts.size() == 1 && parts[0] == "metrics" && method == "GET") {
      return reply(200, metrics_locked());
    }
    if (parts.size() == 1 && parts[0] == "model" && method == "GET") {
      const auto& art = central_.artifact();
      return reply(200, {{"version", art.version},
                         {"kind", to_string(art.kind)},
                         {"digest", central_.current_update().digest},
                         {"model_size", model_size(art)},
                         {"manifest", manifest_json(art.manifest)}});
    }
    if (parts.size() == 1 && parts[0] == "nodes" && method == "GET") {
      json nodes = json::array();
      for (const auto& n : central_.nodes()) {
        nodes.push_back({{"node_id", n.node_id},
                         {"role", to_string(n.role)},
                         {"applied_version", n.applied_version},
                         {"current", n.role != NodeRole::NetLan ||
                                         n.applied_version == central_.model_version()}});
      }
      return reply(200, {{"base_version", central_.model_version()}, {"nodes", nodes}});
    }
  } catch (const aids::Error& e) {
    return error_reply(status_for(e), e.kind(), e.what());
  }
  return error_reply(404, "NotFound", "no route for " + std::string(method) + " " + std::string(path));
}

}  // namespace aids
