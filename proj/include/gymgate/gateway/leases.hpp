#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gymgate/gateway/time.hpp"

namespace gymgate::gateway {

struct Lease {
  std::uint64_t lease_id = 0;
  std::string user_id;
  std::string env_id;
  std::uint64_t session_id = 0;
  TimePoint acquired_at;
  TimePoint heartbeat_deadline;
  std::uint64_t booking_id = 0;

  /// Live up to and including the deadline.
  bool live_at(TimePoint now) const { return now <= heartbeat_deadline; }
};

/// Returns the id of a booking that lets `user` use `env` at `now`.
using BookingLookup =
    std::function<std::optional<std::uint64_t>(const std::string& user, const std::string& env, TimePoint now)>;

struct AcquireResult {
  Lease lease;
  bool renewed = false;              // the session already held this env
  std::optional<Lease> reclaimed;    // expired lease displaced by this grant
};

/// Authority for exclusive environment leases. All operations are atomic
/// with respect to each other.
class LeaseTable {
 public:
  LeaseTable(BookingLookup bookings, std::chrono::milliseconds ttl);

  std::chrono::milliseconds ttl() const { return ttl_; }

  /// NoBooking without a covering booking, Busy while another session holds
  /// a live lease. An expired lease is reclaimed in place.
  AcquireResult acquire(const std::string& user_id, const std::string& env_id, std::uint64_t session_id,
                        TimePoint now);

  /// Releases iff `lease_id` is the current lease on `env_id`.
  bool release(const std::string& env_id, std::uint64_t lease_id);

  /// Releases every lease the session holds.
  std::vector<Lease> release_session(std::uint64_t session_id);

  /// Pushes the deadline of the session's live leases to now + ttl. Leases
  /// already past their deadline stay dead.
  void touch(std::uint64_t session_id, TimePoint now);

  bool is_live(const std::string& env_id, std::uint64_t lease_id, TimePoint now) const;

  /// Releases every lease whose deadline has passed and returns them.
  std::vector<Lease> expire(TimePoint now);

  std::optional<Lease> holder(const std::string& env_id, TimePoint now) const;
  std::vector<Lease> snapshot() const;

 private:
  BookingLookup bookings_;
  std::chrono::milliseconds ttl_;
  mutable std::mutex mutex_;
  std::map<std::string, Lease> by_env_;
  std::uint64_t next_id_ = 1;
};

}  // namespace gymgate::gateway
