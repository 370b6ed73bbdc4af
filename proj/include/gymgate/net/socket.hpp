#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>

#include "gymgate/protocol/message.hpp"

namespace gymgate::net {

struct Address {
  std::string host = "127.0.0.1";
  std::uint16_t port = 7007;
};

/// Parses "host:port" or a bare "host" (default port). Throws BadRequest.
Address parse_address(const std::string& text, std::uint16_t default_port = 7007);

/// Owning wrapper around a connected TCP socket.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();
  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  bool valid() const { return fd_ >= 0; }
  int fd() const { return fd_; }

  void write_all(std::span<const std::uint8_t> bytes);
  /// Fills `out` completely. ConnectionClosed if the peer closes before the
  /// first byte, TruncatedFrame if it closes part way, Timeout on receive
  /// timeout.
  void read_exact(std::span<std::uint8_t> out);
  /// True when at least one byte (or EOF) is readable within `timeout`.
  bool poll_readable(std::chrono::milliseconds timeout) const;
  /// True when unread bytes are already buffered (EOF does not count).
  bool has_pending_data() const;
  void set_receive_timeout(std::chrono::milliseconds timeout);
  /// Wakes any thread blocked on this socket; the descriptor stays owned.
  void shutdown();
  void close();

 private:
  int fd_ = -1;
};

/// Connects with a bounded wait. ConnectionRefused when nothing listens or
/// the deadline passes.
Socket connect_tcp(const Address& address, std::chrono::milliseconds timeout = std::chrono::seconds(5));

class Listener {
 public:
  /// Binds and listens; port 0 picks an ephemeral port.
  Listener(const std::string& host, std::uint16_t port);
  ~Listener();
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  std::uint16_t port() const { return port_; }
  /// Blocks for the next connection; throws ConnectionClosed after shutdown().
  Socket accept();
  void shutdown();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

void write_envelope(Socket& socket, const protocol::Envelope& envelope);
protocol::Envelope read_envelope(Socket& socket);

}  // namespace gymgate::net
