#include "gymgate/protocol/codec.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <set>
#include <string>

#include "json.hpp"

namespace gymgate::protocol {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad_header(const std::string& what) { throw Error(ErrorCode::BadHeader, what); }
[[noreturn]] void bad_request(const std::string& what) { throw Error(ErrorCode::BadRequest, what); }

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32_be(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

double finite(double v, const char* field) {
  if (!std::isfinite(v)) bad_request(std::string(field) + " must be finite");
  return v;
}

// Reads typed fields from one JSON object and rejects keys nobody asked for.
class Fields {
 public:
  Fields(const json& object, std::string where, std::set<std::string> used = {})
      : j_(object), where_(std::move(where)), used_(std::move(used)) {
    if (!j_.is_object()) bad_header(where_ + " must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json& get(const char* key) {
    const auto it = j_.find(key);
    if (it == j_.end()) bad_header(where_ + ": missing field '" + key + "'");
    used_.insert(key);
    return *it;
  }

  std::string str(const char* key) {
    const json& v = get(key);
    if (!v.is_string()) bad_header(where_ + ": '" + key + "' must be a string");
    return v.get<std::string>();
  }

  bool flag(const char* key) {
    const json& v = get(key);
    if (!v.is_boolean()) bad_header(where_ + ": '" + key + "' must be a boolean");
    return v.get<bool>();
  }

  double number(const char* key) { return as_number(get(key), key); }

  double as_number(const json& v, const char* key) const {
    if (!v.is_number()) bad_header(where_ + ": '" + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) bad_header(where_ + ": '" + key + "' must be finite");
    return d;
  }

  std::uint64_t u64(const char* key) { return as_u64(get(key), key); }

  std::uint64_t as_u64(const json& v, const char* key) const {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    bad_header(where_ + ": '" + key + "' must be a non-negative integer");
  }

  std::uint32_t u32(const char* key) {
    const std::uint64_t v = u64(key);
    if (v > std::numeric_limits<std::uint32_t>::max()) bad_header(where_ + ": '" + key + "' out of range");
    return static_cast<std::uint32_t>(v);
  }

  std::int64_t i64(const char* key) {
    const json& v = get(key);
    if (v.is_number_unsigned()) {
      if (v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        bad_header(where_ + ": '" + key + "' out of range");
      }
      return static_cast<std::int64_t>(v.get<std::uint64_t>());
    }
    if (!v.is_number_integer()) bad_header(where_ + ": '" + key + "' must be an integer");
    return v.get<std::int64_t>();
  }

  int bounded_int(const char* key, int lo, int hi) {
    const std::int64_t v = i64(key);
    if (v < lo || v > hi) bad_header(where_ + ": '" + key + "' out of range");
    return static_cast<int>(v);
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.count(item.key())) bad_header(where_ + ": unexpected field '" + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

// --- encoding ---------------------------------------------------------------

json action_to_json(const sim::Action& action) {
  if (const auto* d = std::get_if<sim::DiscreteAction>(&action)) {
    return {{"kind", "discrete"}, {"value", std::string(to_string(*d))}};
  }
  const auto& c = std::get<sim::ContinuousAction>(action);
  return {{"kind", "continuous"}, {"linear", finite(c.linear, "linear")}, {"angular", finite(c.angular, "angular")}};
}

json debug_to_json(const DebugState& d) {
  return {{"x", finite(d.x, "debug.x")},
          {"y", finite(d.y, "debug.y")},
          {"theta", finite(d.theta, "debug.theta")},
          {"monolith_x", finite(d.monolith_x, "debug.monolith_x")},
          {"monolith_y", finite(d.monolith_y, "debug.monolith_y")}};
}

json observation_header(const sim::Observation& o, std::vector<std::uint8_t>& blob) {
  if (o.width < 1 || o.height < 1 || o.width > kMaxImageSide || o.height > kMaxImageSide) {
    bad_request("observation size out of range");
  }
  const std::size_t n = o.pixel_count();
  const bool depth = sim::has_depth(o.channels);
  const bool rgb = sim::has_rgb(o.channels);
  if (o.depth.size() != (depth ? n : 0) || o.rgb.size() != (rgb ? 3 * n : 0)) {
    bad_request("observation planes do not match channels and size");
  }
  blob.reserve(observation_blob_size(o.channels, o.width, o.height));
  for (std::uint16_t v : o.depth) {
    blob.push_back(static_cast<std::uint8_t>(v & 0xff));
    blob.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  blob.insert(blob.end(), o.rgb.begin(), o.rgb.end());
  return {{"channels", std::string(to_string(o.channels))}, {"height", o.height}, {"width", o.width}};
}

void encode_body(const Message& message, json& h, std::vector<std::uint8_t>& blob) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Hello>) {
          h["token"] = m.token;
          h["client_version"] = m.client_version;
        } else if constexpr (std::is_same_v<T, HelloOk>) {
          h["session_id"] = m.session_id;
          h["server_version"] = m.server_version;
        } else if constexpr (std::is_same_v<T, Make>) {
          h["env_name"] = m.env_name;
          h["experiment_name"] = m.experiment_name;
          h["resume_experiment"] = m.resume_experiment;
          h["channel_type"] = std::string(to_string(m.channel_type));
          if (m.seed) h["seed"] = *m.seed;
        } else if constexpr (std::is_same_v<T, MakeOk>) {
          h["env_handle"] = m.env_handle;
          h["obs_shape"] = m.obs_shape;
          h["action_space"] = std::string(to_string(m.action_space));
          if (m.action_bounds) {
            h["action_bounds"] = {finite((*m.action_bounds)[0], "action_bounds"),
                                  finite((*m.action_bounds)[1], "action_bounds")};
          }
        } else if constexpr (std::is_same_v<T, Reset> || std::is_same_v<T, Close>) {
          h["env_handle"] = m.env_handle;
        } else if constexpr (std::is_same_v<T, ResetOk>) {
          h["obs"] = observation_header(m.observation, blob);
          if (m.debug) h["debug"] = debug_to_json(*m.debug);
        } else if constexpr (std::is_same_v<T, Step>) {
          h["env_handle"] = m.env_handle;
          h["action"] = action_to_json(m.action);
        } else if constexpr (std::is_same_v<T, StepOk>) {
          h["obs"] = observation_header(m.observation, blob);
          h["reward"] = finite(m.reward, "reward");
          h["done"] = m.done;
          h["termination"] = std::string(to_string(m.termination));
          if (m.step_index < 0) bad_request("step_index must be non-negative");
          h["step_index"] = m.step_index;
          if (m.debug) h["debug"] = debug_to_json(*m.debug);
        } else if constexpr (std::is_same_v<T, ErrorReply>) {
          h["code"] = std::string(to_string(m.code));
          h["detail"] = m.detail;
        } else if constexpr (std::is_same_v<T, LeaderboardQuery>) {
          h["top_n"] = m.top_n;
        } else if constexpr (std::is_same_v<T, LeaderboardOk>) {
          json entries = json::array();
          for (const auto& e : m.entries) {
            entries.push_back({{"experiment_name", e.experiment_name},
                               {"owner", e.owner},
                               {"env_name", e.env_name},
                               {"episodes_count", e.episodes_count},
                               {"best_window_avg", finite(e.best_window_avg, "best_window_avg")},
                               {"last_updated_ms", e.last_updated_ms}});
          }
          h["entries"] = std::move(entries);
        }
        // Heartbeat and CloseOk carry no fields.
      },
      message);
}

// --- decoding ---------------------------------------------------------------

sim::Action action_from_json(const json& j) {
  Fields f(j, "action");
  const std::string kind = f.str("kind");
  sim::Action action;
  if (kind == "discrete") {
    const auto a = sim::discrete_action_from_string(f.str("value"));
    if (!a) bad_header("action: unknown discrete value");
    action = *a;
  } else if (kind == "continuous") {
    const double linear = f.number("linear");
    const double angular = f.number("angular");
    action = sim::ContinuousAction{linear, angular};
  } else {
    bad_header("action: kind must be 'discrete' or 'continuous'");
  }
  f.finish();
  return action;
}

DebugState debug_from_json(const json& j) {
  Fields f(j, "debug");
  DebugState d;
  d.x = f.number("x");
  d.y = f.number("y");
  d.theta = f.number("theta");
  d.monolith_x = f.number("monolith_x");
  d.monolith_y = f.number("monolith_y");
  f.finish();
  return d;
}

sim::Observation observation_from(const json& j, std::span<const std::uint8_t> blob) {
  Fields f(j, "obs");
  const auto channels = sim::channel_config_from_string(f.str("channels"));
  if (!channels) bad_header("obs: unknown channels");
  sim::Observation o;
  o.channels = *channels;
  o.height = f.bounded_int("height", 1, kMaxImageSide);
  o.width = f.bounded_int("width", 1, kMaxImageSide);
  f.finish();
  const std::size_t expected = observation_blob_size(o.channels, o.width, o.height);
  if (blob.size() != expected) {
    throw Error(ErrorCode::BlobLengthMismatch, "expected " + std::to_string(expected) + " blob bytes for " +
                                                   std::string(to_string(o.channels)) + ", got " +
                                                   std::to_string(blob.size()));
  }
  const std::size_t n = o.pixel_count();
  std::size_t at = 0;
  if (sim::has_depth(o.channels)) {
    o.depth.resize(n);
    for (std::size_t i = 0; i < n; ++i, at += 2) {
      o.depth[i] = static_cast<std::uint16_t>(blob[at] | (blob[at + 1] << 8));
    }
  }
  if (sim::has_rgb(o.channels)) o.rgb.assign(blob.begin() + static_cast<std::ptrdiff_t>(at), blob.end());
  return o;
}

Message decode_body(const std::string& type, Fields& f, const json& h, std::span<const std::uint8_t> blob) {
  auto channel = [&](const char* key) {
    const auto c = sim::channel_config_from_string(f.str(key));
    if (!c) bad_header(std::string("unknown ") + key);
    return *c;
  };
  auto space = [&](const char* key) {
    const std::string s = f.str(key);
    if (s == "discrete") return sim::ActionSpace::Discrete;
    if (s == "continuous") return sim::ActionSpace::Continuous;
    bad_header(std::string("unknown ") + key);
  };

  if (type == "hello") {
    Hello m;
    m.token = f.str("token");
    m.client_version = f.str("client_version");
    return m;
  }
  if (type == "hello_ok") {
    HelloOk m;
    m.session_id = f.str("session_id");
    m.server_version = f.str("server_version");
    return m;
  }
  if (type == "make") {
    Make m;
    m.env_name = f.str("env_name");
    m.experiment_name = f.str("experiment_name");
    m.resume_experiment = f.flag("resume_experiment");
    m.channel_type = channel("channel_type");
    if (f.has("seed")) m.seed = f.u64("seed");
    return m;
  }
  if (type == "make_ok") {
    MakeOk m;
    m.env_handle = f.u32("env_handle");
    const json& shape = f.get("obs_shape");
    if (!shape.is_array() || shape.size() != 3) bad_header("obs_shape must be an array of 3 integers");
    for (std::size_t i = 0; i < 3; ++i) {
      const std::uint64_t v = f.as_u64(shape[i], "obs_shape");
      if (v > static_cast<std::uint64_t>(kMaxImageSide)) bad_header("obs_shape entry out of range");
      m.obs_shape[i] = static_cast<int>(v);
    }
    m.action_space = space("action_space");
    if (f.has("action_bounds")) {
      const json& b = f.get("action_bounds");
      if (!b.is_array() || b.size() != 2) bad_header("action_bounds must be an array of 2 numbers");
      m.action_bounds = std::array<double, 2>{f.as_number(b[0], "action_bounds"), f.as_number(b[1], "action_bounds")};
    }
    return m;
  }
  if (type == "reset") return Reset{f.u32("env_handle")};
  if (type == "close") return Close{f.u32("env_handle")};
  if (type == "close_ok") return CloseOk{};
  if (type == "heartbeat") return Heartbeat{};
  if (type == "reset_ok") {
    ResetOk m;
    m.observation = observation_from(f.get("obs"), blob);
    if (f.has("debug")) m.debug = debug_from_json(f.get("debug"));
    return m;
  }
  if (type == "step") {
    Step m;
    m.env_handle = f.u32("env_handle");
    m.action = action_from_json(f.get("action"));
    return m;
  }
  if (type == "step_ok") {
    StepOk m;
    m.reward = f.number("reward");
    m.done = f.flag("done");
    const auto t = sim::termination_from_string(f.str("termination"));
    if (!t) bad_header("unknown termination");
    m.termination = *t;
    m.step_index = f.bounded_int("step_index", 0, std::numeric_limits<int>::max());
    if (f.has("debug")) m.debug = debug_from_json(f.get("debug"));
    m.observation = observation_from(f.get("obs"), blob);
    return m;
  }
  if (type == "error") {
    ErrorReply m;
    const auto code = error_code_from_string(f.str("code"));
    if (!code) bad_header("unknown error code");
    m.code = *code;
    m.detail = f.str("detail");
    return m;
  }
  if (type == "leaderboard_query") return LeaderboardQuery{f.u32("top_n")};
  if (type == "leaderboard_ok") {
    LeaderboardOk m;
    const json& entries = f.get("entries");
    if (!entries.is_array()) bad_header("entries must be an array");
    for (const json& item : entries) {
      Fields e(item, "entry");
      LeaderboardEntry entry;
      entry.experiment_name = e.str("experiment_name");
      entry.owner = e.str("owner");
      entry.env_name = e.str("env_name");
      entry.episodes_count = e.u64("episodes_count");
      entry.best_window_avg = e.number("best_window_avg");
      entry.last_updated_ms = e.i64("last_updated_ms");
      e.finish();
      m.entries.push_back(std::move(entry));
    }
    return m;
  }
  (void)h;
  throw Error(ErrorCode::UnknownType, "unknown message type '" + type + "'");
}

}  // namespace

std::size_t observation_blob_size(sim::ChannelConfig channels, int width, int height) {
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  return (sim::has_depth(channels) ? 2 * n : 0) + (sim::has_rgb(channels) ? 3 * n : 0);
}

std::vector<std::uint8_t> encode_frame(const Envelope& envelope) {
  json h = json::object();
  h["id"] = envelope.id;
  h["type"] = std::string(type_name(envelope.message));
  h["v"] = kProtocolVersion;
  std::vector<std::uint8_t> blob;
  encode_body(envelope.message, h, blob);

  std::string header;
  try {
    header = h.dump(-1, ' ', false, json::error_handler_t::strict);
  } catch (const json::exception& e) {
    bad_request(std::string("header not encodable: ") + e.what());
  }
  const std::size_t length = 4 + header.size() + blob.size();
  if (length > kMaxFrameLength) {
    throw Error(ErrorCode::OversizeFrame, "frame of " + std::to_string(length) + " bytes exceeds limit");
  }
  std::vector<std::uint8_t> out;
  out.reserve(4 + length);
  put_u32_be(out, static_cast<std::uint32_t>(length));
  put_u32_be(out, static_cast<std::uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), blob.begin(), blob.end());
  return out;
}

std::uint32_t check_length_prefix(std::span<const std::uint8_t, 4> prefix) {
  const std::uint32_t length = get_u32_be(prefix.data());
  if (length > kMaxFrameLength) {
    throw Error(ErrorCode::OversizeFrame, "declared length " + std::to_string(length) + " exceeds limit");
  }
  if (length < 4) bad_header("length smaller than the header_len field");
  return length;
}

Envelope decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw Error(ErrorCode::TruncatedFrame, "missing length prefix");
  const std::uint32_t length = check_length_prefix(bytes.first<4>());
  const std::size_t rest = bytes.size() - 4;
  if (rest < length) {
    throw Error(ErrorCode::TruncatedFrame,
                "frame declares " + std::to_string(length) + " bytes, " + std::to_string(rest) + " present");
  }
  if (rest > length) throw Error(ErrorCode::TrailingBytes, std::to_string(rest - length) + " bytes after frame");
  return decode_payload(bytes.subspan(4));
}

Envelope decode_payload(std::span<const std::uint8_t> payload) {
  if (payload.size() < 4) throw Error(ErrorCode::TruncatedFrame, "missing header_len");
  const std::uint32_t header_len = get_u32_be(payload.data());
  if (header_len > payload.size() - 4) bad_header("header_len exceeds frame length");
  const auto* begin = payload.data() + 4;
  const json h = json::parse(begin, begin + header_len, nullptr, false);
  if (h.is_discarded()) bad_header("header is not valid JSON");
  Fields f(h, "header", {"id", "type", "v"});

  const auto v = h.find("v");
  if (v == h.end()) bad_header("missing field 'v'");
  if (!v->is_number_integer()) bad_header("'v' must be an integer");
  if (!(v->is_number_unsigned() && v->get<std::uint64_t>() == kProtocolVersion)) {
    throw Error(ErrorCode::VersionMismatch, "protocol version " + v->dump() + " not supported, expected 1");
  }
  const auto type = h.find("type");
  if (type == h.end() || !type->is_string()) bad_header("missing or non-string 'type'");
  const auto id = h.find("id");
  if (id == h.end()) bad_header("missing field 'id'");

  Envelope env;
  env.id = f.as_u64(*id, "id");
  const auto blob = payload.subspan(4 + header_len);
  env.message = decode_body(type->get<std::string>(), f, h, blob);
  f.finish();
  if (!carries_observation(env.message) && !blob.empty()) {
    throw Error(ErrorCode::BlobLengthMismatch, "unexpected blob on " + std::string(type_name(env.message)));
  }
  return env;
}

}  // namespace gymgate::protocol
