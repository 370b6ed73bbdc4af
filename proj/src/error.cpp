#include "gymgate/error.hpp"

#include <array>
#include <utility>

namespace gymgate {

namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 28> kNames{{
    {ErrorCode::InvalidConfig, "invalid-config"},
    {ErrorCode::SpawnExhausted, "spawn-exhausted"},
    {ErrorCode::WrongActionKind, "wrong-action-kind"},
    {ErrorCode::NoEpisode, "no-episode"},
    {ErrorCode::InvalidAction, "invalid-action"},
    {ErrorCode::TruncatedFrame, "truncated-frame"},
    {ErrorCode::OversizeFrame, "oversize-frame"},
    {ErrorCode::BadHeader, "bad-header"},
    {ErrorCode::UnknownType, "unknown-type"},
    {ErrorCode::VersionMismatch, "version-mismatch"},
    {ErrorCode::BlobLengthMismatch, "blob-length-mismatch"},
    {ErrorCode::TrailingBytes, "trailing-bytes"},
    {ErrorCode::PipeliningUnsupported, "pipelining-unsupported"},
    {ErrorCode::AuthFailed, "auth-failed"},
    {ErrorCode::NoBooking, "no-booking"},
    {ErrorCode::Busy, "busy"},
    {ErrorCode::LeaseLost, "lease-lost"},
    {ErrorCode::NameTaken, "name-taken"},
    {ErrorCode::NotFound, "not-found"},
    {ErrorCode::UnknownEnv, "unknown-env"},
    {ErrorCode::BookingOverlap, "booking-overlap"},
    {ErrorCode::BadRequest, "bad-request"},
    {ErrorCode::StorageFailure, "storage-failure"},
    {ErrorCode::Internal, "internal"},
    {ErrorCode::ConnectionRefused, "connection-refused"},
    {ErrorCode::ConnectionClosed, "connection-closed"},
    {ErrorCode::Timeout, "timeout"},
    {ErrorCode::IoFailure, "io-failure"},
}};

}  // namespace

std::string_view to_string(ErrorCode code) {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "internal";
}

std::optional<ErrorCode> error_code_from_string(std::string_view name) {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  return std::nullopt;
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + (detail.empty() ? "" : ": " + detail)),
      code_(code),
      detail_(detail) {}

}  // namespace gymgate
