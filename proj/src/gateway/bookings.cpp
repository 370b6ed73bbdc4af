#include "gymgate/gateway/bookings.hpp"

#include "gymgate/error.hpp"

namespace gymgate::gateway {

BookingStore::BookingStore(const std::filesystem::path& file) : file_(file) {
  std::lock_guard lock(mutex_);
  refresh_locked();
}

void BookingStore::refresh_locked() {
  for (const auto& r : file_.read_new()) {
    try {
      bookings_.push_back(Booking{r.at("booking_id").get<std::uint64_t>(), r.at("user").get<std::string>(),
                                  r.at("env").get<std::string>(), from_unix_ms(r.at("start_ms").get<std::int64_t>()),
                                  from_unix_ms(r.at("end_ms").get<std::int64_t>())});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::StorageFailure, file_.path().string() + ": malformed booking record: " + e.what());
    }
  }
}

Booking BookingStore::add(const std::string& user_id, const std::string& env_id, TimePoint start, TimePoint end) {
  if (!(end > start)) throw Error(ErrorCode::BadRequest, "booking end must be after its start");
  std::lock_guard lock(mutex_);
  Booking booking{0, user_id, env_id, start, end};
  file_.locked([&] {
    refresh_locked();
    std::uint64_t next = 1;
    for (const auto& b : bookings_) {
      next = std::max(next, b.booking_id + 1);
      if (b.env_id == env_id && b.overlaps(booking)) {
        throw Error(ErrorCode::BookingOverlap, env_id + " is already booked by " + b.user_id + " from " +
                                                   format_utc(b.start) + " to " + format_utc(b.end));
      }
    }
    booking.booking_id = next;
    file_.append({{"booking_id", booking.booking_id},
                  {"user", user_id},
                  {"env", env_id},
                  {"start_ms", to_unix_ms(start)},
                  {"end_ms", to_unix_ms(end)}});
    refresh_locked();
  });
  return booking;
}

std::optional<Booking> BookingStore::covering(const std::string& user_id, const std::string& env_id, TimePoint now) {
  std::lock_guard lock(mutex_);
  refresh_locked();
  for (const auto& b : bookings_) {
    if (b.user_id == user_id && b.env_id == env_id && b.covers(now)) return b;
  }
  return std::nullopt;
}

bool BookingStore::any_covering(const std::string& user_id, TimePoint now) {
  std::lock_guard lock(mutex_);
  refresh_locked();
  for (const auto& b : bookings_) {
    if (b.user_id == user_id && b.covers(now)) return true;
  }
  return false;
}

std::vector<Booking> BookingStore::all() {
  std::lock_guard lock(mutex_);
  refresh_locked();
  return bookings_;
}

}  // namespace gymgate::gateway
