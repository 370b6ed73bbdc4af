#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "gymgate/client/session.hpp"
#include "gymgate/protocol/message.hpp"
#include "gymgate/sim/world.hpp"

namespace gymgate::client {

/// What a policy sees after reset or step.
struct Transition {
  sim::Observation observation;
  double reward = 0.0;
  bool done = false;
  sim::Termination termination = sim::Termination::None;
  int step_index = 0;
  std::optional<protocol::DebugState> debug;

  bool operator==(const Transition&) const = default;
};

/// An environment the agent loop can drive, remote or in-process.
class EnvEndpoint {
 public:
  virtual ~EnvEndpoint() = default;
  virtual sim::ActionSpace action_space() const = 0;
  virtual std::optional<std::array<double, 2>> action_bounds() const = 0;
  virtual std::array<int, 3> obs_shape() const = 0;
  virtual Transition reset() = 0;
  virtual Transition step(const sim::Action& action) = 0;
};

/// An environment leased through a gateway. Closes the handle on
/// destruction (best effort).
class RemoteEnv : public EnvEndpoint {
 public:
  RemoteEnv(ClientSession& session, const protocol::Make& request);
  ~RemoteEnv() override;
  RemoteEnv(const RemoteEnv&) = delete;
  RemoteEnv& operator=(const RemoteEnv&) = delete;

  std::uint32_t handle() const { return info_.env_handle; }
  const protocol::MakeOk& info() const { return info_; }

  sim::ActionSpace action_space() const override { return info_.action_space; }
  std::optional<std::array<double, 2>> action_bounds() const override { return info_.action_bounds; }
  std::array<int, 3> obs_shape() const override { return info_.obs_shape; }
  Transition reset() override;
  Transition step(const sim::Action& action) override;

 private:
  ClientSession& session_;
  protocol::MakeOk info_;
};

/// A world in this process, for comparison runs and offline checks.
class LocalEnv : public EnvEndpoint {
 public:
  LocalEnv(sim::WorldConfig config, std::uint64_t seed, sim::ChannelConfig channels, bool expose_debug = false);

  sim::World& world() { return world_; }

  sim::ActionSpace action_space() const override { return world_.config().action_space; }
  std::optional<std::array<double, 2>> action_bounds() const override;
  std::array<int, 3> obs_shape() const override;
  Transition reset() override;
  Transition step(const sim::Action& action) override;

 private:
  std::optional<protocol::DebugState> debug() const;

  sim::World world_;
  bool expose_debug_;
};

}  // namespace gymgate::client
