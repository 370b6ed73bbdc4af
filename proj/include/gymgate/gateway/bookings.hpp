#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gymgate/gateway/jsonl.hpp"
#include "gymgate/gateway/time.hpp"

namespace gymgate::gateway {

/// Half-open interval [start, end) during which `user_id` may lease `env_id`.
struct Booking {
  std::uint64_t booking_id = 0;
  std::string user_id;
  std::string env_id;
  TimePoint start;
  TimePoint end;

  bool covers(TimePoint t) const { return start <= t && t < end; }
  bool overlaps(const Booking& other) const { return start < other.end && other.start < end; }
  bool operator==(const Booking&) const = default;
};

/// Time bookings backed by bookings.jsonl. Intervals on one env never overlap.
class BookingStore {
 public:
  explicit BookingStore(const std::filesystem::path& file);

  /// BadRequest when end <= start, BookingOverlap when another booking on the
  /// same env intersects.
  Booking add(const std::string& user_id, const std::string& env_id, TimePoint start, TimePoint end);

  std::optional<Booking> covering(const std::string& user_id, const std::string& env_id, TimePoint now);
  bool any_covering(const std::string& user_id, TimePoint now);
  std::vector<Booking> all();

 private:
  void refresh_locked();

  std::mutex mutex_;
  JsonlFile file_;
  std::vector<Booking> bookings_;
};

}  // namespace gymgate::gateway
