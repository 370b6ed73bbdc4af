#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gymgate {

// Every failure that can cross a module boundary or the wire. The string
// form (to_string) is what travels in Error replies.
enum class ErrorCode {
  // world-sim
  InvalidConfig,
  SpawnExhausted,
  WrongActionKind,
  NoEpisode,
  InvalidAction,
  // protocol
  TruncatedFrame,
  OversizeFrame,
  BadHeader,
  UnknownType,
  VersionMismatch,
  BlobLengthMismatch,
  TrailingBytes,
  PipeliningUnsupported,
  // gateway
  AuthFailed,
  NoBooking,
  Busy,
  LeaseLost,
  NameTaken,
  NotFound,
  UnknownEnv,
  BookingOverlap,
  BadRequest,
  StorageFailure,
  Internal,
  // transport
  ConnectionRefused,
  ConnectionClosed,
  Timeout,
  IoFailure,
};

std::string_view to_string(ErrorCode code);
std::optional<ErrorCode> error_code_from_string(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace gymgate
