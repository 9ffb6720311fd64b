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

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "aids/nodes.hpp"
#include "aids/service.hpp"

namespace aids {

/// Newline-framed text over a connected TCP socket. Writes are serialised;
/// reads belong to one thread.
class LineSocket {
 public:
  explicit LineSocket(int fd);
  ~LineSocket();
  LineSocket(const LineSocket&) = delete;
  LineSocket& operator=(const LineSocket&) = delete;

  /// Next line without its newline; nullopt at end of stream.
  std::optional<std::string> read_line();
  /// Throws IoError once the peer is gone.
  void write_line(std::string_view line);
  void send(const Envelope& env) { write_line(encode_message(env)); }
  /// Sends end-of-stream; reads keep working until the peer closes.
  void close_write();
  /// Unblocks a pending read_line.
  void shutdown();

 private:
  int fd_;
  std::string buffer_;
  std::mutex write_mu_;
};

/// Throws IoError when the connection cannot be made.
std::unique_ptr<LineSocket> tcp_connect(const std::string& host, int port);

class TcpListener {
 public:
  /// Port 0 picks a free port. Throws IoError.
  TcpListener(const std::string& host, int port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  int port() const { return port_; }
  /// nullptr once close() has been called.
  std::unique_ptr<LineSocket> accept();
  void close();

 private:
  int fd_;
  int port_ = 0;
};

/// Central's node-facing endpoint: one thread per connection feeding the
/// service, and ModelUpdate broadcasts to every connected Net-LAN monitor.
class CentralServer {
 public:
  explicit CentralServer(CentralService& service);
  ~CentralServer();
  CentralServer(const CentralServer&) = delete;
  CentralServer& operator=(const CentralServer&) = delete;

  int start(const std::string& host, int port);
  void stop();

 private:
  struct Peer;
  void serve(std::shared_ptr<Peer> peer);
  void broadcast(const Envelope& env);

  CentralService& service_;
  std::unique_ptr<TcpListener> listener_;
  std::thread accept_thread_;
  std::mutex mu_;
  std::vector<std::shared_ptr<Peer>> peers_;
};

struct MonitorRunOptions {
  std::string host = "127.0.0.1";
  int port = 0;
  std::string node_id = "netlan-1";
  /// How long to wait for the first model before streaming into the buffer.
  std::chrono::milliseconds model_wait{10000};
  /// How long to keep applying updates after the stream ends.
  std::chrono::milliseconds linger{0};
};

struct MonitorRunSummary {
  NetLanMonitor::Counters counters;
  std::vector<std::uint64_t> versions;
};

/// Registers with Central, applies every ModelUpdate it receives and sends
/// an alarm for each record predicted Attack.
MonitorRunSummary run_monitor(const MonitorRunOptions& options,
                              std::span<const ConnectionRecord> records);

struct HoneypotRunOptions {
  std::string host = "127.0.0.1";
  int port = 0;
  std::string node_id = "honeypot-1";
  double p_detect = 1.0;
  std::uint64_t seed = 0;
};

/// Registers as a honeypot and reports the attacks its audit detector sees.
/// Returns the number of alarms sent.
std::size_t run_honeypot(const HoneypotRunOptions& options,
                         std::span<const ConnectionRecord> records);

}  // namespace aids
