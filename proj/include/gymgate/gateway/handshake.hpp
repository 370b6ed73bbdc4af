#pragma once

#include <optional>
#include <string>

#include "gymgate/gateway/bookings.hpp"
#include "gymgate/gateway/time.hpp"
#include "gymgate/gateway/users.hpp"
#include "gymgate/protocol/message.hpp"

namespace gymgate::gateway {

struct HandshakeResult {
  protocol::Message reply;             // HelloOk or ErrorReply
  std::optional<std::string> user_id;  // set on success
};

/// Known token and a booking covering `now` on any env -> HelloOk carrying
/// `session_id`; otherwise auth-failed or no-booking.
HandshakeResult handshake(const protocol::Hello& hello, UserStore& users, BookingStore& bookings, TimePoint now,
                          const std::string& session_id);

}  // namespace gymgate::gateway
