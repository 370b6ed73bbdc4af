#include "gymgate/sim/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "gymgate/error.hpp"

namespace gymgate::sim {

std::string_view to_string(DiscreteAction action) {
  switch (action) {
    case DiscreteAction::Left: return "left";
    case DiscreteAction::Right: return "right";
    case DiscreteAction::Forward: return "forward";
    case DiscreteAction::Backward: return "backward";
  }
  return "forward";
}

std::optional<DiscreteAction> discrete_action_from_string(std::string_view name) {
  for (auto a : {DiscreteAction::Left, DiscreteAction::Right, DiscreteAction::Forward, DiscreteAction::Backward}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

ActionSpace action_space_of(const Action& action) {
  return std::holds_alternative<DiscreteAction>(action) ? ActionSpace::Discrete : ActionSpace::Continuous;
}

void check_action(const Action& action, ActionSpace space) {
  if (action_space_of(action) != space) {
    throw Error(ErrorCode::WrongActionKind,
                std::string(to_string(action_space_of(action))) + " action sent to a " +
                    std::string(to_string(space)) + " environment");
  }
  if (const auto* c = std::get_if<ContinuousAction>(&action)) {
    if (!std::isfinite(c->linear) || !std::isfinite(c->angular)) {
      throw Error(ErrorCode::InvalidAction, "continuous action components must be finite");
    }
  }
}

Velocity commanded_velocity(const Action& action, const ActionParams& params) {
  if (const auto* d = std::get_if<DiscreteAction>(&action)) {
    switch (*d) {
      case DiscreteAction::Forward: return {params.linear_speed, 0.0};
      case DiscreteAction::Backward: return {-params.linear_speed, 0.0};
      case DiscreteAction::Left: return {0.0, params.angular_speed};
      case DiscreteAction::Right: return {0.0, -params.angular_speed};
    }
  }
  const auto& c = std::get<ContinuousAction>(action);
  return {std::clamp(c.linear, -params.continuous_linear_bound, params.continuous_linear_bound),
          std::clamp(c.angular, -params.continuous_angular_bound, params.continuous_angular_bound)};
}

Pose2D integrate_unicycle(const Pose2D& pose, Velocity velocity, double duration) {
  const double v = velocity.linear;
  const double w = velocity.angular;
  const double dtheta = w * duration;
  Pose2D out = pose;
  if (dtheta == 0.0) {
    out.x += v * duration * std::cos(pose.theta);
    out.y += v * duration * std::sin(pose.theta);
  } else {
    const double radius = v / w;
    out.x += radius * (std::sin(pose.theta + dtheta) - std::sin(pose.theta));
    out.y -= radius * (std::cos(pose.theta + dtheta) - std::cos(pose.theta));
  }
  out.theta = normalize_angle(pose.theta + dtheta);
  return out;
}

Pose2D apply_action(const Pose2D& pose, const Action& action, const ActionParams& params) {
  return integrate_unicycle(pose, commanded_velocity(action, params), params.step_duration);
}

}  // namespace gymgate::sim
