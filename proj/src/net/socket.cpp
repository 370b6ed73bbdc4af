#include "gymgate/net/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <vector>

#include "gymgate/protocol/codec.hpp"

namespace gymgate::net {

namespace {

[[noreturn]] void io_error(ErrorCode code, const std::string& what) {
  throw Error(code, what + ": " + std::strerror(errno));
}

sockaddr_in resolve(const Address& address) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  const int rc = ::getaddrinfo(address.host.c_str(), nullptr, &hints, &result);
  if (rc != 0 || result == nullptr) {
    throw Error(ErrorCode::ConnectionRefused, "cannot resolve " + address.host + ": " + ::gai_strerror(rc));
  }
  sockaddr_in addr{};
  std::memcpy(&addr, result->ai_addr, sizeof(addr));
  ::freeaddrinfo(result);
  addr.sin_port = htons(address.port);
  return addr;
}

}  // namespace

Address parse_address(const std::string& text, std::uint16_t default_port) {
  Address a;
  a.port = default_port;
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) {
    if (!text.empty()) a.host = text;
    return a;
  }
  if (colon > 0) a.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  unsigned value = 0;
  const auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc() || end != port.data() + port.size() || value == 0 || value > 65535) {
    throw Error(ErrorCode::BadRequest, "invalid port in address '" + text + "'");
  }
  a.port = static_cast<std::uint16_t>(value);
  return a;
}

Socket::~Socket() { close(); }

Socket::Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

void Socket::write_all(std::span<const std::uint8_t> bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) io_error(ErrorCode::Timeout, "send");
      io_error(ErrorCode::ConnectionClosed, "send");
    }
    sent += static_cast<std::size_t>(n);
  }
}

void Socket::read_exact(std::span<std::uint8_t> out) {
  std::size_t got = 0;
  while (got < out.size()) {
    const ssize_t n = ::recv(fd_, out.data() + got, out.size() - got, 0);
    if (n == 0) {
      if (got == 0) throw Error(ErrorCode::ConnectionClosed, "peer closed the connection");
      throw Error(ErrorCode::TruncatedFrame, "peer closed mid-frame");
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) throw Error(ErrorCode::Timeout, "receive timed out");
      io_error(ErrorCode::ConnectionClosed, "recv");
    }
    got += static_cast<std::size_t>(n);
  }
}

bool Socket::poll_readable(std::chrono::milliseconds timeout) const {
  pollfd p{fd_, POLLIN, 0};
  const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
  return rc > 0 && (p.revents & (POLLIN | POLLHUP | POLLERR)) != 0;
}

bool Socket::has_pending_data() const {
  std::uint8_t byte = 0;
  return ::recv(fd_, &byte, 1, MSG_PEEK | MSG_DONTWAIT) > 0;
}

void Socket::set_receive_timeout(std::chrono::milliseconds timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
}

void Socket::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

Socket connect_tcp(const Address& address, std::chrono::milliseconds timeout) {
  const sockaddr_in addr = resolve(address);
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) io_error(ErrorCode::IoFailure, "socket");
  const int flags = ::fcntl(s.fd(), F_GETFL, 0);
  ::fcntl(s.fd(), F_SETFL, flags | O_NONBLOCK);
  const std::string where = address.host + ":" + std::to_string(address.port);
  if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0) {
    if (errno != EINPROGRESS) io_error(ErrorCode::ConnectionRefused, "connect " + where);
    pollfd p{s.fd(), POLLOUT, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc == 0) throw Error(ErrorCode::ConnectionRefused, "connect " + where + ": timed out");
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (rc < 0 || err != 0) {
      errno = err;
      io_error(ErrorCode::ConnectionRefused, "connect " + where);
    }
  }
  ::fcntl(s.fd(), F_SETFL, flags);
  int one = 1;
  ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return s;
}

Listener::Listener(const std::string& host, std::uint16_t port) {
  const sockaddr_in addr = resolve(Address{host, port});
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) io_error(ErrorCode::IoFailure, "socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0) {
    const int saved = errno;
    ::close(fd_);
    errno = saved;
    io_error(ErrorCode::IoFailure, "bind " + host + ":" + std::to_string(port));
  }
  if (::listen(fd_, 64) < 0) io_error(ErrorCode::IoFailure, "listen");
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

Listener::~Listener() {
  if (fd_ >= 0) ::close(fd_);
}

Socket Listener::accept() {
  while (true) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      return Socket(fd);
    }
    if (errno == EINTR || errno == ECONNABORTED) continue;
    throw Error(ErrorCode::ConnectionClosed, "listener shut down");
  }
}

void Listener::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void write_envelope(Socket& socket, const protocol::Envelope& envelope) {
  socket.write_all(protocol::encode_frame(envelope));
}

protocol::Envelope read_envelope(Socket& socket) {
  std::array<std::uint8_t, 4> prefix{};
  socket.read_exact(prefix);
  const std::uint32_t length = protocol::check_length_prefix(prefix);
  std::vector<std::uint8_t> payload(length);
  try {
    socket.read_exact(payload);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConnectionClosed) throw Error(ErrorCode::TruncatedFrame, "peer closed mid-frame");
    throw;
  }
  return protocol::decode_payload(payload);
}

}  // namespace gymgate::net
