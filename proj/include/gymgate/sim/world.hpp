#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gymgate/sim/geometry.hpp"
#include "gymgate/sim/kinematics.hpp"
#include "gymgate/sim/observation.hpp"
#include "gymgate/sim/raycast.hpp"
#include "gymgate/sim/world_config.hpp"

namespace gymgate::sim {

struct RewardOutcome {
  double reward = 0.0;
  bool success = false;
};

/// Sparse reward: 1 when the robot center is within reward_radius of the
/// monolith center (inclusive).
RewardOutcome compute_reward(const Pose2D& pose, const WorldConfig& config);

/// Simulated monolith arena. Single-threaded; all randomness comes from the
/// instance's own generator, so (config, seed, actions) fixes every output.
class World {
 public:
  /// Throws Error{InvalidConfig}.
  World(WorldConfig config, std::uint64_t seed, ChannelConfig channels = ChannelConfig::Rgbd);

  const WorldConfig& config() const { return config_; }
  ChannelConfig channels() const { return channels_; }
  void set_channels(ChannelConfig channels) { channels_ = channels; }

  /// Starts a new episode at a rejection-sampled pose, abandoning any
  /// episode in progress. Throws Error{SpawnExhausted}.
  Observation reset();
  /// Starts a new episode at an explicit pose. Throws Error{BadRequest} if
  /// the pose collides.
  Observation reset_to(const Pose2D& pose);
  /// Throws Error{NoEpisode}, Error{WrongActionKind}, Error{InvalidAction}.
  StepResult step(const Action& action);
  void abandon_episode() { active_ = false; }

  bool episode_active() const { return active_; }
  int step_index() const { return step_index_; }
  /// Ground-truth pose. Never part of an Observation.
  const Pose2D& pose() const { return pose_; }

  Termination check_termination() const;
  bool collides(const Pose2D& pose) const;
  /// True when `pose` is an acceptable episode start.
  bool spawn_valid(const Pose2D& pose) const;

  /// Moves along the commanded arc plus a linearly blended jitter offset and
  /// stops at the last collision-free pose (1 mm resolution).
  Pose2D resolve_motion(const Pose2D& start, const Action& action, const Pose2D& jitter = {}) const;

  std::vector<std::uint16_t> render_depth(const Pose2D& pose) const;
  std::vector<std::uint8_t> render_rgb(const Pose2D& pose) const;
  Observation render(const Pose2D& pose) const;

  const Scene& scene() const { return scene_; }
  const PinholeCamera& camera() const { return camera_; }
  std::uint8_t ground_intensity(double x, double y) const;

 private:
  Observation begin_episode(const Pose2D& pose);
  Observation render_planes(const Pose2D& pose, ChannelConfig channels) const;
  std::uint8_t shade(const std::optional<RayHit>& hit) const;

  WorldConfig config_;
  Scene scene_;
  PinholeCamera camera_;
  ChannelConfig channels_;
  std::mt19937_64 rng_;
  std::uint64_t texture_seed_;

  Pose2D pose_;
  int step_index_ = 0;
  bool active_ = false;
};

World create_world(const WorldConfig& config, std::uint64_t seed);

}  // namespace gymgate::sim
