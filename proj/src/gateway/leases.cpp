#include "gymgate/gateway/leases.hpp"

#include "gymgate/error.hpp"

namespace gymgate::gateway {

LeaseTable::LeaseTable(BookingLookup bookings, std::chrono::milliseconds ttl)
    : bookings_(std::move(bookings)), ttl_(ttl) {}

AcquireResult LeaseTable::acquire(const std::string& user_id, const std::string& env_id, std::uint64_t session_id,
                                  TimePoint now) {
  // The booking lookup may touch disk; do it before taking the table lock.
  const auto booking = bookings_(user_id, env_id, now);
  std::lock_guard lock(mutex_);
  if (!booking) throw Error(ErrorCode::NoBooking, user_id + " has no booking for " + env_id + " at " + format_utc(now));

  AcquireResult result;
  const auto it = by_env_.find(env_id);
  if (it != by_env_.end()) {
    Lease& current = it->second;
    if (current.live_at(now)) {
      if (current.session_id != session_id) {
        throw Error(ErrorCode::Busy, env_id + " is leased by another session");
      }
      current.heartbeat_deadline = now + ttl_;
      current.booking_id = *booking;
      result.lease = current;
      result.renewed = true;
      return result;
    }
    result.reclaimed = current;
    by_env_.erase(it);
  }
  Lease lease{next_id_++, user_id, env_id, session_id, now, now + ttl_, *booking};
  by_env_.emplace(env_id, lease);
  result.lease = lease;
  return result;
}

bool LeaseTable::release(const std::string& env_id, std::uint64_t lease_id) {
  std::lock_guard lock(mutex_);
  const auto it = by_env_.find(env_id);
  if (it == by_env_.end() || it->second.lease_id != lease_id) return false;
  by_env_.erase(it);
  return true;
}

std::vector<Lease> LeaseTable::release_session(std::uint64_t session_id) {
  std::lock_guard lock(mutex_);
  std::vector<Lease> released;
  for (auto it = by_env_.begin(); it != by_env_.end();) {
    if (it->second.session_id == session_id) {
      released.push_back(it->second);
      it = by_env_.erase(it);
    } else {
      ++it;
    }
  }
  return released;
}

void LeaseTable::touch(std::uint64_t session_id, TimePoint now) {
  std::lock_guard lock(mutex_);
  for (auto& [env, lease] : by_env_) {
    if (lease.session_id == session_id && lease.live_at(now)) lease.heartbeat_deadline = now + ttl_;
  }
}

bool LeaseTable::is_live(const std::string& env_id, std::uint64_t lease_id, TimePoint now) const {
  std::lock_guard lock(mutex_);
  const auto it = by_env_.find(env_id);
  return it != by_env_.end() && it->second.lease_id == lease_id && it->second.live_at(now);
}

std::vector<Lease> LeaseTable::expire(TimePoint now) {
  std::lock_guard lock(mutex_);
  std::vector<Lease> released;
  for (auto it = by_env_.begin(); it != by_env_.end();) {
    if (!it->second.live_at(now)) {
      released.push_back(it->second);
      it = by_env_.erase(it);
    } else {
      ++it;
    }
  }
  return released;
}

std::optional<Lease> LeaseTable::holder(const std::string& env_id, TimePoint now) const {
  std::lock_guard lock(mutex_);
  const auto it = by_env_.find(env_id);
  if (it == by_env_.end() || !it->second.live_at(now)) return std::nullopt;
  return it->second;
}

std::vector<Lease> LeaseTable::snapshot() const {
  std::lock_guard lock(mutex_);
  std::vector<Lease> out;
  for (const auto& [env, lease] : by_env_) out.push_back(lease);
  return out;
}

}  // namespace gymgate::gateway
