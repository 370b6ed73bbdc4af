#pragma once

#include <chrono>
#include <cstdint>
#include <string>

namespace gymgate::gateway {

using Clock = std::chrono::system_clock;
using TimePoint = Clock::time_point;

std::int64_t to_unix_ms(TimePoint t);
TimePoint from_unix_ms(std::int64_t ms);

/// "2026-10-19T10:00:00Z" (UTC, second precision).
std::string format_utc(TimePoint t);

/// Accepts ISO-8601 UTC ("2026-10-19T10:00:00Z", optional fractional
/// seconds), integer epoch seconds, or "now" with an optional signed offset
/// such as "now+90m" (suffixes s, m, h, d; bare numbers are seconds).
/// Throws BadRequest.
TimePoint parse_time(const std::string& text, TimePoint now);

}  // namespace gymgate::gateway
