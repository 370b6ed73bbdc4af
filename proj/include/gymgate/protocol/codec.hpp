#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gymgate/protocol/message.hpp"

namespace gymgate::protocol {

// Frame layout (all integers big-endian):
//   u32 length      bytes following this field
//   u32 header_len
//   header          UTF-8 JSON object, keys sorted
//   blob            length - 4 - header_len raw bytes
inline constexpr std::uint32_t kMaxFrameLength = 8u * 1024u * 1024u;
inline constexpr int kMaxImageSide = 4096;

/// Expected blob size for an observation with the given planes.
std::size_t observation_blob_size(sim::ChannelConfig channels, int width, int height);

/// Full frame including the length prefix. Throws BadRequest for values the
/// schema cannot represent (non-finite numbers, plane size mismatches,
/// invalid UTF-8) and OversizeFrame past kMaxFrameLength.
std::vector<std::uint8_t> encode_frame(const Envelope& envelope);

/// Decodes one complete frame. Never crashes on hostile input; every
/// failure is an Error with one of the protocol codes.
Envelope decode_frame(std::span<const std::uint8_t> bytes);

/// Decodes the bytes after the length prefix.
Envelope decode_payload(std::span<const std::uint8_t> payload);

/// Validates a length prefix read off a stream and returns it.
std::uint32_t check_length_prefix(std::span<const std::uint8_t, 4> prefix);

}  // namespace gymgate::protocol
