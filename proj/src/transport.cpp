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

#include "aids/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>

#include "aids/errors.hpp"

namespace aids {

namespace {

std::string sys_error(const std::string& what) { return what + ": " + std::strerror(errno); }

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

}  // namespace

LineSocket::LineSocket(int fd) : fd_(fd) {}

LineSocket::~LineSocket() {
  if (fd_ >= 0) ::close(fd_);
}

std::optional<std::string> LineSocket::read_line() {
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return std::nullopt;
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void LineSocket::write_line(std::string_view line) {
  std::string framed(line);
  framed.push_back('\n');
  std::lock_guard<std::mutex> lock(write_mu_);
  std::size_t sent = 0;
  while (sent < framed.size()) {
    const ssize_t n = ::send(fd_, framed.data() + sent, framed.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw IoError(sys_error("send"));
    sent += static_cast<std::size_t>(n);
  }
}

void LineSocket::close_write() { ::shutdown(fd_, SHUT_WR); }

void LineSocket::shutdown() { ::shutdown(fd_, SHUT_RDWR); }

std::unique_ptr<LineSocket> tcp_connect(const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    throw IoError("resolve " + host + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (auto* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw IoError(sys_error("connect " + host + ":" + service));
  set_nodelay(fd);
  return std::make_unique<LineSocket>(fd);
}

TcpListener::TcpListener(const std::string& host, int port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw IoError(sys_error("socket"));
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw IoError("not an IPv4 address: " + host);
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(fd_, 64) != 0) {
    const auto msg = sys_error("bind " + host + ":" + std::to_string(port));
    ::close(fd_);
    throw IoError(msg);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  close();
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<LineSocket> TcpListener::accept() {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) {
      set_nodelay(fd);
      return std::make_unique<LineSocket>(fd);
    }
    if (errno == EINTR || errno == ECONNABORTED) continue;
    return nullptr;
  }
}

void TcpListener::close() { ::shutdown(fd_, SHUT_RDWR); }

struct CentralServer::Peer {
  std::unique_ptr<LineSocket> socket;
  std::thread thread;
  bool netlan = false;
};

CentralServer::CentralServer(CentralService& service) : service_(service) {
  service_.set_broadcast([this](const Envelope& env) { broadcast(env); });
}

CentralServer::~CentralServer() {
  stop();
  service_.set_broadcast(nullptr);
}

int CentralServer::start(const std::string& host, int port) {
  listener_ = std::make_unique<TcpListener>(host, port);
  accept_thread_ = std::thread([this] {
    while (auto sock = listener_->accept()) {
      auto peer = std::make_shared<Peer>();
      peer->socket = std::move(sock);
      std::lock_guard<std::mutex> lock(mu_);
      peers_.push_back(peer);
      peer->thread = std::thread(&CentralServer::serve, this, peer);
    }
  });
  return listener_->port();
}

void CentralServer::stop() {
  if (!listener_) return;
  listener_->close();
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<std::shared_ptr<Peer>> peers;
  {
    std::lock_guard<std::mutex> lock(mu_);
    peers.swap(peers_);
  }
  for (auto& p : peers) p->socket->shutdown();
  for (auto& p : peers) {
    if (p->thread.joinable()) p->thread.join();
  }
  listener_.reset();
}

void CentralServer::serve(std::shared_ptr<Peer> peer) {
  const std::string self = service_.read([](const Central& c) { return c.config().node_id; });
  while (auto line = peer->socket->read_line()) {
    if (line->empty()) continue;
    try {
      std::vector<Envelope> replies;
      try {
        const Envelope env = decode_message(*line);
        if (const auto* reg = std::get_if<RegisterBody>(&env.body);
            reg != nullptr && reg->role == NodeRole::NetLan) {
          std::lock_guard<std::mutex> lock(mu_);
          peer->netlan = true;  // before registering, so no broadcast is missed
        }
        replies = service_.on_envelope(env);
      } catch (const aids::Error& e) {
        replies.push_back(error_envelope(self, e));
      }
      for (const auto& r : replies) peer->socket->send(r);
    } catch (const IoError&) {
      break;
    }
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    peer->netlan = false;
  }
  peer->socket->shutdown();
}

void CentralServer::broadcast(const Envelope& env) {
  if (env.type() != MsgType::ModelUpdate) return;
  std::vector<std::shared_ptr<Peer>> targets;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& p : peers_) {
      if (p->netlan) targets.push_back(p);
    }
  }
  for (const auto& p : targets) {
    try {
      p->socket->send(env);
    } catch (const IoError&) {
    }
  }
}

MonitorRunSummary run_monitor(const MonitorRunOptions& options,
                              std::span<const ConnectionRecord> records) {
  auto sock = tcp_connect(options.host, options.port);
  NetLanMonitor monitor(options.node_id);
  std::mutex mu;
  std::condition_variable cv;

  std::thread reader([&] {
    while (auto line = sock->read_line()) {
      try {
        const Envelope env = decode_message(*line);
        const auto* update = std::get_if<ModelUpdate>(&env.body);
        if (update == nullptr) continue;
        {
          // The Ack goes out before the streaming thread can see the model.
          std::lock_guard<std::mutex> lock(mu);
          if (monitor.apply_update(*update)) {
            sock->send({options.node_id, kProtocolVersion, AckBody{"model", update->version}});
          }
        }
        cv.notify_all();
      } catch (const IoError&) {
        break;
      } catch (const aids::Error& e) {
        try {
          sock->send(error_envelope(options.node_id, e));
        } catch (const IoError&) {
          break;
        }
      }
    }
  });

  const auto send_alarm = [&](const AlarmReport& alarm) {
    sock->send({options.node_id, kProtocolVersion, alarm});
  };
  try {
    sock->send({options.node_id, kProtocolVersion, RegisterBody{options.node_id, NodeRole::NetLan}});
    {
      std::unique_lock<std::mutex> lock(mu);
      cv.wait_for(lock, options.model_wait, [&] { return monitor.has_model(); });
    }
    for (const auto& record : records) {
      std::optional<AlarmReport> alarm;
      std::vector<AlarmReport> flushed;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (monitor.has_model() && monitor.buffered() > 0) flushed = monitor.flush_buffer(wall_clock_ms());
        alarm = monitor.process(record, wall_clock_ms());
      }
      for (const auto& a : flushed) send_alarm(a);
      if (alarm) send_alarm(*alarm);
    }
    std::vector<AlarmReport> flushed;
    {
      std::lock_guard<std::mutex> lock(mu);
      if (monitor.has_model()) flushed = monitor.flush_buffer(wall_clock_ms());
    }
    for (const auto& a : flushed) send_alarm(a);
    if (options.linger.count() > 0) std::this_thread::sleep_for(options.linger);
  } catch (...) {
    sock->shutdown();
    reader.join();
    throw;
  }
  sock->close_write();
  reader.join();
  return {monitor.counters(), monitor.version_history()};
}

std::size_t run_honeypot(const HoneypotRunOptions& options,
                         std::span<const ConnectionRecord> records) {
  auto sock = tcp_connect(options.host, options.port);
  HnMonitor honeypot(options.node_id, options.p_detect, options.seed);
  sock->send({options.node_id, kProtocolVersion, RegisterBody{options.node_id, NodeRole::Honeypot}});
  for (const auto& record : records) {
    if (auto alarm = honeypot.process(record, wall_clock_ms())) {
      sock->send({options.node_id, kProtocolVersion, *alarm});
    }
  }
  sock->close_write();
  while (sock->read_line()) {
  }
  return honeypot.alarms_raised();
}

}  // namespace aids
