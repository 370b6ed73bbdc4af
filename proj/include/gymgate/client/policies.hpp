#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>

#include "json.hpp"

#include "gymgate/client/endpoint.hpp"
#include "gymgate/sim/kinematics.hpp"
#include "gymgate/sim/world_config.hpp"

namespace gymgate::client {

class Policy {
 public:
  virtual ~Policy() = default;
  virtual void begin_episode() {}
  /// Chooses the next action from the latest transition.
  virtual sim::Action act(const Transition& last) = 0;
};

/// Uniform over the four discrete actions, or over the continuous box.
class RandomPolicy : public Policy {
 public:
  RandomPolicy(sim::ActionSpace space, std::optional<std::array<double, 2>> bounds, std::uint64_t seed);
  sim::Action act(const Transition& last) override;

 private:
  sim::ActionSpace space_;
  std::array<double, 2> bounds_{0.5, 1.0};
  std::mt19937_64 rng_;
};

struct ServoParams {
  int dark_threshold = 60;       // rgb: gray level below which a pixel counts as monolith
  int min_target_pixels = 20;    // rgb: fewer dark pixels means nothing in view
  double range_jump = 0.3;       // depth: meters separating two surfaces
  double min_top_height = 0.7;   // depth: targets whose top is in view end in this band
  double max_top_height = 1.6;
  double max_target_width = 0.6; // depth: meters; wider near surfaces are walls
  double turn_threshold = 0.4;   // rad of bearing error before turning instead of driving
  double cruise_fraction = 0.6;  // continuous: linear speed as a fraction of its bound
  sim::CameraConfig camera;      // geometry used to back-project depth
  sim::ActionParams action;      // step duration for continuous steering
};

/// Unknown keys throw InvalidConfig.
ServoParams servo_params_from_json(const nlohmann::json& j);
ServoParams load_servo_params(const std::filesystem::path& path);

/// Turns toward the nearest dark or tall object and drives at it. Uses RGB
/// when present, depth otherwise; with nothing in view it turns left.
class ServoPolicy : public Policy {
 public:
  ServoPolicy(sim::ActionSpace space, std::optional<std::array<double, 2>> bounds, ServoParams params = {});
  sim::Action act(const Transition& last) override;

  /// Bearing of the target in radians, positive to the left, or nullopt.
  std::optional<double> target_bearing(const sim::Observation& obs) const;

 private:
  std::optional<double> rgb_target(const sim::Observation& obs) const;
  std::optional<double> depth_target(const sim::Observation& obs) const;
  double column_bearing(double u, int width) const;

  sim::ActionSpace space_;
  std::array<double, 2> bounds_{0.5, 1.0};
  ServoParams params_;
};

/// Drives straight at the monolith using the debug pose. Throws BadRequest
/// when a transition carries no debug state.
class OraclePolicy : public Policy {
 public:
  OraclePolicy(sim::ActionSpace space, sim::ActionParams params = {});
  sim::Action act(const Transition& last) override;

 private:
  sim::ActionSpace space_;
  sim::ActionParams params_;
};

enum class PolicyKind { Random, Servo, Oracle };

std::optional<PolicyKind> policy_kind_from_string(std::string_view name);

std::unique_ptr<Policy> make_policy(PolicyKind kind, const EnvEndpoint& env, std::uint64_t seed,
                                    const ServoParams& servo = {});

}  // namespace gymgate::client
