#include "gymgate/client/endpoint.hpp"

namespace gymgate::client {

RemoteEnv::RemoteEnv(ClientSession& session, const protocol::Make& request)
    : session_(session), info_(session.make_env(request)) {}

RemoteEnv::~RemoteEnv() {
  try {
    session_.close_env(info_.env_handle);
  } catch (const Error&) {
    // The server drops the lease on disconnect or expiry anyway.
  }
}

Transition RemoteEnv::reset() {
  protocol::ResetOk ok = session_.reset(info_.env_handle);
  Transition t;
  t.observation = std::move(ok.observation);
  t.debug = ok.debug;
  return t;
}

Transition RemoteEnv::step(const sim::Action& action) {
  protocol::StepOk ok = session_.step(info_.env_handle, action);
  return Transition{std::move(ok.observation), ok.reward, ok.done, ok.termination, ok.step_index, ok.debug};
}

LocalEnv::LocalEnv(sim::WorldConfig config, std::uint64_t seed, sim::ChannelConfig channels, bool expose_debug)
    : world_(std::move(config), seed, channels), expose_debug_(expose_debug) {}

std::optional<std::array<double, 2>> LocalEnv::action_bounds() const {
  if (action_space() != sim::ActionSpace::Continuous) return std::nullopt;
  const auto& p = world_.config().action_params;
  return std::array<double, 2>{p.continuous_linear_bound, p.continuous_angular_bound};
}

std::array<int, 3> LocalEnv::obs_shape() const {
  const auto& cam = world_.config().camera;
  return {cam.height_px, cam.width, sim::channel_count(world_.channels())};
}

std::optional<protocol::DebugState> LocalEnv::debug() const {
  if (!expose_debug_) return std::nullopt;
  const auto& p = world_.pose();
  const auto& m = world_.config().monolith.center;
  return protocol::DebugState{p.x, p.y, p.theta, m.x(), m.y()};
}

Transition LocalEnv::reset() {
  Transition t;
  t.observation = world_.reset();
  t.debug = debug();
  return t;
}

Transition LocalEnv::step(const sim::Action& action) {
  sim::StepResult r = world_.step(action);
  return Transition{std::move(r.observation), r.reward, r.done, r.info.termination, r.info.step_index, debug()};
}

}  // namespace gymgate::client
