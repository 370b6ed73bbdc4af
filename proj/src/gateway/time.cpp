#include "gymgate/gateway/time.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>
#include <regex>

#include "gymgate/error.hpp"

namespace gymgate::gateway {

std::int64_t to_unix_ms(TimePoint t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

TimePoint from_unix_ms(std::int64_t ms) {
  return TimePoint(std::chrono::duration_cast<Clock::duration>(std::chrono::milliseconds(ms)));
}

std::string format_utc(TimePoint t) {
  const std::time_t secs = Clock::to_time_t(t);
  std::tm tm{};
  ::gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

[[noreturn]] void bad_time(const std::string& text) {
  throw Error(ErrorCode::BadRequest, "cannot parse time '" + text + "'");
}

std::int64_t to_int(const std::string& s, const std::string& whole) {
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) bad_time(whole);
  return v;
}

}  // namespace

TimePoint parse_time(const std::string& text, TimePoint now) {
  static const std::regex relative(R"(now(?:([+-])(\d+)([smhd]?))?)");
  static const std::regex epoch(R"(-?\d+)");
  static const std::regex iso(R"((\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})(\.\d+)?Z)");
  std::smatch m;
  if (std::regex_match(text, m, relative)) {
    if (!m[1].matched) return now;
    std::int64_t amount = to_int(m[2], text);
    const std::string unit = m[3];
    if (unit == "m") amount *= 60;
    if (unit == "h") amount *= 3600;
    if (unit == "d") amount *= 86400;
    const auto offset = std::chrono::seconds(m[1] == "-" ? -amount : amount);
    return now + offset;
  }
  if (std::regex_match(text, epoch)) return TimePoint(std::chrono::seconds(to_int(text, text)));
  if (std::regex_match(text, m, iso)) {
    using namespace std::chrono;
    const year_month_day ymd{year(static_cast<int>(to_int(m[1], text))),
                             month(static_cast<unsigned>(to_int(m[2], text))),
                             day(static_cast<unsigned>(to_int(m[3], text)))};
    if (!ymd.ok()) bad_time(text);
    const auto h = to_int(m[4], text);
    const auto mi = to_int(m[5], text);
    const auto s = to_int(m[6], text);
    if (h > 23 || mi > 59 || s > 60) bad_time(text);
    TimePoint t = sys_days(ymd) + hours(h) + minutes(mi) + seconds(s);
    if (m[7].matched) {
      const double frac = std::stod("0" + m[7].str());
      t += duration_cast<Clock::duration>(duration<double>(frac));
    }
    return t;
  }
  bad_time(text);
}

}  // namespace gymgate::gateway
