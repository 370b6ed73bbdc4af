#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gymgate/error.hpp"
#include "gymgate/sim/kinematics.hpp"
#include "gymgate/sim/observation.hpp"
#include "gymgate/sim/world_config.hpp"

namespace gymgate::protocol {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::string_view kServerVersion = "gymgate/0.1";
inline constexpr std::string_view kClientVersion = "gymctl/0.1";

struct Hello {
  std::string token;
  std::string client_version;
  bool operator==(const Hello&) const = default;
};

struct HelloOk {
  std::string session_id;
  std::string server_version;
  bool operator==(const HelloOk&) const = default;
};

struct Make {
  std::string env_name;
  std::string experiment_name;
  bool resume_experiment = false;
  sim::ChannelConfig channel_type = sim::ChannelConfig::DepthOnly;
  std::optional<std::uint64_t> seed;  // fixes the world RNG when present
  bool operator==(const Make&) const = default;
};

struct MakeOk {
  std::uint32_t env_handle = 0;
  std::array<int, 3> obs_shape{};  // height, width, channels
  sim::ActionSpace action_space = sim::ActionSpace::Discrete;
  // Continuous spaces only: symmetric bounds on (linear, angular).
  std::optional<std::array<double, 2>> action_bounds;
  bool operator==(const MakeOk&) const = default;
};

struct Reset {
  std::uint32_t env_handle = 0;
  bool operator==(const Reset&) const = default;
};

/// Privileged state, sent only by servers started with debug pose enabled.
struct DebugState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double monolith_x = 0.0;
  double monolith_y = 0.0;
  bool operator==(const DebugState&) const = default;
};

struct ResetOk {
  sim::Observation observation;
  std::optional<DebugState> debug;
  bool operator==(const ResetOk&) const = default;
};

struct Step {
  std::uint32_t env_handle = 0;
  sim::Action action = sim::DiscreteAction::Forward;
  bool operator==(const Step&) const = default;
};

struct StepOk {
  sim::Observation observation;
  double reward = 0.0;
  bool done = false;
  sim::Termination termination = sim::Termination::None;
  int step_index = 0;
  std::optional<DebugState> debug;
  bool operator==(const StepOk&) const = default;
};

struct Close {
  std::uint32_t env_handle = 0;
  bool operator==(const Close&) const = default;
};

struct CloseOk {
  bool operator==(const CloseOk&) const = default;
};

struct ErrorReply {
  ErrorCode code = ErrorCode::Internal;
  std::string detail;
  bool operator==(const ErrorReply&) const = default;
};

struct Heartbeat {
  bool operator==(const Heartbeat&) const = default;
};

struct LeaderboardQuery {
  std::uint32_t top_n = 10;
  bool operator==(const LeaderboardQuery&) const = default;
};

struct LeaderboardEntry {
  std::string experiment_name;
  std::string owner;
  std::string env_name;
  std::uint64_t episodes_count = 0;
  double best_window_avg = 0.0;
  std::int64_t last_updated_ms = 0;  // unix epoch milliseconds
  bool operator==(const LeaderboardEntry&) const = default;
};

struct LeaderboardOk {
  std::vector<LeaderboardEntry> entries;
  bool operator==(const LeaderboardOk&) const = default;
};

using Message = std::variant<Hello, HelloOk, Make, MakeOk, Reset, ResetOk, Step, StepOk, Close, CloseOk, ErrorReply,
                             Heartbeat, LeaderboardQuery, LeaderboardOk>;

/// Wire name of the alternative held by `m`, e.g. "step_ok".
std::string_view type_name(const Message& m);

/// True for the two messages that carry an observation blob.
bool carries_observation(const Message& m);

struct Envelope {
  std::uint64_t id = 0;
  Message message;
  bool operator==(const Envelope&) const = default;
};

/// Throws `Error(reply.code, reply.detail)` when `m` is an ErrorReply.
void raise_if_error(const Message& m);

}  // namespace gymgate::protocol
