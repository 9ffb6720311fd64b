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

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "aids/nodes.hpp"

namespace aids {

std::int64_t wall_clock_ms();

struct HttpResponse {
  int status = 200;
  std::string body;
};

/// Central behind a mutex, with retraining on a background thread and the
/// officer HTTP API. Every state change goes through here.
class CentralService {
 public:
  using Clock = std::function<std::int64_t()>;
  using Broadcast = std::function<void(const Envelope&)>;

  explicit CentralService(Central central, Clock clock = wall_clock_ms);
  ~CentralService();
  CentralService(const CentralService&) = delete;
  CentralService& operator=(const CentralService&) = delete;

  /// Receives ModelUpdate broadcasts (and retrain failures).
  void set_broadcast(Broadcast fn);
  /// Start a retrain by itself whenever the evidence threshold is reached.
  void set_auto_retrain(bool on);
  /// Runs on the retrain thread before training; tests use it to hold a
  /// retrain open.
  void set_retrain_gate(std::function<void()> gate);
  /// Latest MetricsReport (JSON) shown under GET /metrics.
  void set_report(nlohmann::json report);

  std::vector<Envelope> on_envelope(const Envelope& env);

  /// Throws Conflict while a retrain runs and NoNewEvidence when there is
  /// nothing to train on and `force` is false.
  void start_retrain(bool force);
  void wait_for_retrain();

  HttpResponse handle_http(std::string_view method, std::string_view path,
                           const std::map<std::string, std::string>& query, std::string_view body);

  template <typename F>
  auto read(F&& f) const {
    std::lock_guard<std::mutex> lock(mu_);
    return f(central_);
  }

 private:
  void maybe_auto_retrain_locked();
  void start_retrain_locked(bool force);
  void retrain_worker(RetrainJob job);
  void publish(std::vector<Envelope> outbox);
  nlohmann::json metrics_locked() const;

  mutable std::mutex mu_;
  std::condition_variable idle_cv_;
  Central central_;
  Clock clock_;
  Broadcast broadcast_;
  std::function<void()> gate_;
  nlohmann::json report_;
  bool auto_retrain_ = true;
  bool retrain_running_ = false;
  std::string last_retrain_error_;
  std::thread worker_;
};

/// The officer HTTP API served with cpp-httplib.
class HttpServer {
 public:
  explicit HttpServer(CentralService& service);
  ~HttpServer();
  /// Binds (port 0 picks a free port), starts serving on a thread and
  /// returns the bound port.
  int start(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace aids
