#include "gymgate/client/session.hpp"

#include <array>

#include "gymgate/protocol/codec.hpp"

namespace gymgate::client {

using namespace gymgate::protocol;

ClientSession::ClientSession(const net::Address& address, std::string token, SessionOptions options)
    : options_(std::move(options)) {
  socket_ = net::connect_tcp(address, options_.connect_timeout);
  if (options_.receive_timeout.count() > 0) socket_.set_receive_timeout(options_.receive_timeout);

  Message reply;
  {
    std::lock_guard lock(io_mutex_);
    reply = exchange_locked(Hello{std::move(token), std::string(kClientVersion)});
  }
  raise_if_error(reply);
  const auto* ok = std::get_if<HelloOk>(&reply);
  if (!ok) throw Error(ErrorCode::BadHeader, std::string("expected hello_ok, got ") + std::string(type_name(reply)));
  session_id_ = ok->session_id;
  server_version_ = ok->server_version;

  if (options_.heartbeat_interval.count() > 0) heartbeat_thread_ = std::thread([this] { heartbeat_loop(); });
}

ClientSession::~ClientSession() { close(); }

void ClientSession::close() {
  {
    std::lock_guard lock(stop_mutex_);
    stopping_ = true;
  }
  stop_cv_.notify_all();
  if (heartbeat_thread_.joinable()) heartbeat_thread_.join();
  std::lock_guard lock(io_mutex_);
  socket_.close();
  broken_ = true;
}

Message ClientSession::exchange_locked(const Message& message) {
  if (broken_ || !socket_.valid()) throw Error(ErrorCode::ConnectionClosed, "session is closed");
  const std::uint64_t id = next_id_++;
  try {
    const std::vector<std::uint8_t> frame = encode_frame(Envelope{id, message});
    if (options_.wire_tap) options_.wire_tap(Direction::Sent, frame);
    socket_.write_all(frame);

    std::vector<std::uint8_t> in(4);
    socket_.read_exact(std::span<std::uint8_t>(in.data(), 4));
    const std::uint32_t length = check_length_prefix(std::span<const std::uint8_t, 4>(in.data(), 4));
    in.resize(4 + static_cast<std::size_t>(length));
    try {
      socket_.read_exact(std::span<std::uint8_t>(in.data() + 4, length));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConnectionClosed) throw Error(ErrorCode::TruncatedFrame, "server closed mid-frame");
      throw;
    }
    if (options_.wire_tap) options_.wire_tap(Direction::Received, in);
    Envelope reply = decode_frame(in);
    if (reply.id == 0) {
      // Connection-level error: the server closes after sending it.
      broken_ = true;
      raise_if_error(reply.message);
    }
    if (reply.id != id) {
      throw Error(ErrorCode::BadHeader, "reply id " + std::to_string(reply.id) + " does not match request " +
                                            std::to_string(id));
    }
    return std::move(reply.message);
  } catch (const Error& e) {
    // An encode failure leaves the stream untouched; anything later does not.
    if (e.code() != ErrorCode::BadRequest) broken_ = true;
    throw;
  }
}

Message ClientSession::request(Message message) {
  Message reply;
  {
    std::lock_guard lock(io_mutex_);
    reply = exchange_locked(message);
  }
  raise_if_error(reply);
  return reply;
}

namespace {

template <typename T>
T expect(Message reply) {
  if (auto* v = std::get_if<T>(&reply)) return std::move(*v);
  throw Error(ErrorCode::BadHeader, "unexpected reply type " + std::string(type_name(reply)));
}

}  // namespace

MakeOk ClientSession::make_env(const Make& m) {
  MakeOk ok = expect<MakeOk>(request(m));
  std::lock_guard lock(io_mutex_);
  envs_[ok.env_handle] = ok;
  return ok;
}

ResetOk ClientSession::reset(std::uint32_t env_handle) { return expect<ResetOk>(request(Reset{env_handle})); }

StepOk ClientSession::step(std::uint32_t env_handle, const sim::Action& action) {
  std::optional<sim::ActionSpace> space;
  {
    std::lock_guard lock(io_mutex_);
    if (auto it = envs_.find(env_handle); it != envs_.end()) space = it->second.action_space;
  }
  // Unknown handles go to the server, which owns the answer.
  if (space) sim::check_action(action, *space);
  return expect<StepOk>(request(Step{env_handle, action}));
}

void ClientSession::close_env(std::uint32_t env_handle) {
  expect<CloseOk>(request(Close{env_handle}));
  std::lock_guard lock(io_mutex_);
  envs_.erase(env_handle);
}

std::vector<LeaderboardEntry> ClientSession::leaderboard(std::uint32_t top_n) {
  return expect<LeaderboardOk>(request(LeaderboardQuery{top_n})).entries;
}

void ClientSession::heartbeat() { expect<Heartbeat>(request(Heartbeat{})); }

std::map<std::uint32_t, MakeOk> ClientSession::open_envs() const {
  std::lock_guard lock(io_mutex_);
  return envs_;
}

void ClientSession::heartbeat_loop() {
  std::unique_lock stop_lock(stop_mutex_);
  while (!stop_cv_.wait_for(stop_lock, options_.heartbeat_interval, [this] { return stopping_; })) {
    // A request in flight refreshes the lease by itself; skip this beat.
    std::unique_lock io(io_mutex_, std::try_to_lock);
    if (!io.owns_lock() || broken_) continue;
    try {
      exchange_locked(Heartbeat{});
    } catch (const Error&) {
      // broken_ is set; the next request reports the failure.
    }
  }
}

}  // namespace gymgate::client
