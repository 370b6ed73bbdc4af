#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "gymgate/sim/geometry.hpp"
#include "gymgate/sim/world_config.hpp"

namespace gymgate::sim {

enum class DiscreteAction { Left, Right, Forward, Backward };

std::string_view to_string(DiscreteAction action);
std::optional<DiscreteAction> discrete_action_from_string(std::string_view name);

struct ContinuousAction {
  double linear = 0.0;   // m/s
  double angular = 0.0;  // rad/s, positive turns left

  bool operator==(const ContinuousAction&) const = default;
};

using Action = std::variant<DiscreteAction, ContinuousAction>;

ActionSpace action_space_of(const Action& action);

/// Throws WrongActionKind when the action does not belong to `space`, and
/// InvalidAction for non-finite continuous components.
void check_action(const Action& action, ActionSpace space);

struct Velocity {
  double linear = 0.0;
  double angular = 0.0;
};

/// Discrete actions map to fixed speeds; continuous ones are clamped to the
/// configured bounds.
Velocity commanded_velocity(const Action& action, const ActionParams& params);

/// Closed-form unicycle motion at constant (v, omega) for `duration` seconds.
Pose2D integrate_unicycle(const Pose2D& pose, Velocity velocity, double duration);

/// One full step of open-loop motion, ignoring collisions.
Pose2D apply_action(const Pose2D& pose, const Action& action, const ActionParams& params);

}  // namespace gymgate::sim
