#include "gymgate/gateway/handshake.hpp"

namespace gymgate::gateway {

HandshakeResult handshake(const protocol::Hello& hello, UserStore& users, BookingStore& bookings, TimePoint now,
                          const std::string& session_id) {
  const auto user = users.by_token(hello.token);
  if (!user) return {protocol::ErrorReply{ErrorCode::AuthFailed, "unknown token"}, std::nullopt};
  if (!bookings.any_covering(user->id, now)) {
    return {protocol::ErrorReply{ErrorCode::NoBooking, user->id + " has no booking covering " + format_utc(now)},
            std::nullopt};
  }
  return {protocol::HelloOk{session_id, std::string(protocol::kServerVersion)}, user->id};
}

}  // namespace gymgate::gateway
