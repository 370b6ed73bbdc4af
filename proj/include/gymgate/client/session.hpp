#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "gymgate/net/socket.hpp"
#include "gymgate/protocol/message.hpp"

namespace gymgate::client {

enum class Direction { Sent, Received };

struct SessionOptions {
  std::chrono::milliseconds heartbeat_interval{10'000};  // zero disables the heartbeat thread
  std::chrono::milliseconds connect_timeout{5'000};
  std::chrono::milliseconds receive_timeout{0};  // zero waits forever
  // Sees every complete frame as it crosses the socket.
  std::function<void(Direction, std::span<const std::uint8_t>)> wire_tap;
};

/// One authenticated connection to a gateway. Requests are strictly
/// sequential; the background heartbeat only runs while no request is in
/// flight. Safe to hand between threads, not to use from two at once.
class ClientSession {
 public:
  /// Connects and performs the handshake. Throws ConnectionRefused,
  /// AuthFailed, NoBooking, VersionMismatch and transport errors.
  ClientSession(const net::Address& address, std::string token, SessionOptions options = {});
  ~ClientSession();
  ClientSession(const ClientSession&) = delete;
  ClientSession& operator=(const ClientSession&) = delete;

  const std::string& session_id() const { return session_id_; }
  const std::string& server_version() const { return server_version_; }

  protocol::MakeOk make_env(const protocol::Make& request);
  protocol::ResetOk reset(std::uint32_t env_handle);
  /// Checks the action against the handle's space before sending
  /// (WrongActionKind, InvalidAction).
  protocol::StepOk step(std::uint32_t env_handle, const sim::Action& action);
  void close_env(std::uint32_t env_handle);
  std::vector<protocol::LeaderboardEntry> leaderboard(std::uint32_t top_n = 10);
  void heartbeat();

  /// Handles returned by make_env and not yet closed.
  std::map<std::uint32_t, protocol::MakeOk> open_envs() const;

  /// Stops the heartbeat and closes the socket. Idempotent.
  void close();

 private:
  protocol::Message request(protocol::Message message);
  protocol::Message exchange_locked(const protocol::Message& message);
  void heartbeat_loop();

  net::Socket socket_;
  SessionOptions options_;
  std::string session_id_;
  std::string server_version_;

  mutable std::mutex io_mutex_;  // the single request slot
  std::uint64_t next_id_ = 1;
  bool broken_ = false;
  std::map<std::uint32_t, protocol::MakeOk> envs_;

  std::mutex stop_mutex_;
  std::condition_variable stop_cv_;
  bool stopping_ = false;
  std::thread heartbeat_thread_;
};

}  // namespace gymgate::client
