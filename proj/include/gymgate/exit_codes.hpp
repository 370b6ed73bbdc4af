#pragma once

#include "gymgate/error.hpp"

namespace gymgate {

// Process exit statuses shared by the command-line tools.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // local failures: files, storage, internal
inline constexpr int kExitUsage = 2;
inline constexpr int kExitAuth = 3;
inline constexpr int kExitBusy = 4;
inline constexpr int kExitTransport = 5;

constexpr int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::WrongActionKind:
    case ErrorCode::InvalidAction:
    case ErrorCode::NameTaken:
    case ErrorCode::NotFound:
    case ErrorCode::UnknownEnv:
    case ErrorCode::BookingOverlap:
    case ErrorCode::BadRequest:
    case ErrorCode::NoEpisode:
      return kExitUsage;
    case ErrorCode::AuthFailed:
    case ErrorCode::NoBooking:
      return kExitAuth;
    case ErrorCode::Busy:
    case ErrorCode::LeaseLost:
      return kExitBusy;
    case ErrorCode::TruncatedFrame:
    case ErrorCode::OversizeFrame:
    case ErrorCode::BadHeader:
    case ErrorCode::UnknownType:
    case ErrorCode::VersionMismatch:
    case ErrorCode::BlobLengthMismatch:
    case ErrorCode::TrailingBytes:
    case ErrorCode::PipeliningUnsupported:
    case ErrorCode::ConnectionRefused:
    case ErrorCode::ConnectionClosed:
    case ErrorCode::Timeout:
      return kExitTransport;
    case ErrorCode::SpawnExhausted:
    case ErrorCode::StorageFailure:
    case ErrorCode::Internal:
    case ErrorCode::IoFailure:
      return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace gymgate
