#include "gymgate/sim/world.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "gymgate/error.hpp"

namespace gymgate::sim {

std::string_view to_string(ChannelConfig channels) {
  switch (channels) {
    case ChannelConfig::DepthOnly: return "depth";
    case ChannelConfig::RgbOnly: return "rgb";
    case ChannelConfig::Rgbd: return "rgbd";
  }
  return "rgbd";
}

std::optional<ChannelConfig> channel_config_from_string(std::string_view name) {
  for (auto c : {ChannelConfig::DepthOnly, ChannelConfig::RgbOnly, ChannelConfig::Rgbd}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view to_string(Termination termination) {
  switch (termination) {
    case Termination::None: return "none";
    case Termination::Success: return "success";
    case Termination::StepLimit: return "step_limit";
    case Termination::Boundary: return "boundary";
  }
  return "none";
}

std::optional<Termination> termination_from_string(std::string_view name) {
  for (auto t : {Termination::None, Termination::Success, Termination::StepLimit, Termination::Boundary}) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

namespace {

// Path sampling step and binary-search resolution for motion resolution.
constexpr double kPathSampleSpacing = 0.01;
constexpr double kContactTolerance = 0.001;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RewardOutcome compute_reward(const Pose2D& pose, const WorldConfig& config) {
  const double distance = (pose.position() - config.monolith.center).norm();
  const bool success = distance <= config.reward_radius;
  return {success ? 1.0 : 0.0, success};
}

World::World(WorldConfig config, std::uint64_t seed, ChannelConfig channels)
    : config_((validate(config), std::move(config))),
      scene_(make_scene(config_)),
      camera_(config_.camera),
      channels_(channels),
      rng_(seed),
      texture_seed_(splitmix64(seed)) {}

World create_world(const WorldConfig& config, std::uint64_t seed) { return World(config, seed); }

bool World::collides(const Pose2D& pose) const {
  const auto& footprint = config_.robot_footprint;
  if (wall_clearance(pose, footprint, config_.enclosure_size) < 0.0) return true;
  if (footprint_overlaps_box(pose, footprint, config_.monolith)) return true;
  return std::any_of(config_.obstacles.begin(), config_.obstacles.end(),
                     [&](const Box& box) { return footprint_overlaps_box(pose, footprint, box); });
}

bool World::spawn_valid(const Pose2D& pose) const {
  if (collides(pose)) return false;
  if ((pose.position() - config_.monolith.center).norm() < config_.spawn_min_monolith_distance) return false;
  // Turning in place must not trip the boundary stop.
  const double disc_clearance =
      point_wall_clearance(pose.position(), config_.enclosure_size) - config_.robot_footprint.circumradius();
  return disc_clearance >= config_.boundary_margin;
}

Observation World::reset() {
  const Eigen::Vector2d half = config_.enclosure_size.half_extents();
  std::uniform_real_distribution<double> ux(-half.x(), half.x());
  std::uniform_real_distribution<double> uy(-half.y(), half.y());
  std::uniform_real_distribution<double> utheta(-std::numbers::pi, std::numbers::pi);
  for (int attempt = 0; attempt < config_.spawn_max_attempts; ++attempt) {
    Pose2D candidate;
    candidate.x = ux(rng_);
    candidate.y = uy(rng_);
    candidate.theta = normalize_angle(utheta(rng_));
    if (spawn_valid(candidate)) return begin_episode(candidate);
  }
  active_ = false;
  throw Error(ErrorCode::SpawnExhausted,
              "no valid spawn pose after " + std::to_string(config_.spawn_max_attempts) + " attempts");
}

Observation World::reset_to(const Pose2D& pose) {
  Pose2D normalized = pose;
  normalized.theta = normalize_angle(pose.theta);
  if (collides(normalized)) throw Error(ErrorCode::BadRequest, "requested start pose collides");
  return begin_episode(normalized);
}

Observation World::begin_episode(const Pose2D& pose) {
  pose_ = pose;
  step_index_ = 0;
  active_ = true;
  return render(pose_);
}

Pose2D World::resolve_motion(const Pose2D& start, const Action& action, const Pose2D& jitter) const {
  const Velocity velocity = commanded_velocity(action, config_.action_params);
  const double duration = config_.action_params.step_duration;
  const double reach = config_.robot_footprint.circumradius();

  auto at = [&](double s) {
    Pose2D p = integrate_unicycle(start, velocity, s * duration);
    p.x += s * jitter.x;
    p.y += s * jitter.y;
    p.theta = normalize_angle(p.theta + s * jitter.theta);
    return p;
  };

  // Upper bound on how far any footprint point travels over the whole step.
  const double travel = std::abs(velocity.linear) * duration + std::abs(velocity.angular) * duration * reach +
                        std::hypot(jitter.x, jitter.y) + std::abs(jitter.theta) * reach;
  if (travel == 0.0 || collides(start)) return start;

  const int samples = std::max(1, static_cast<int>(std::ceil(travel / kPathSampleSpacing)));
  for (int k = 1; k <= samples; ++k) {
    const double s = static_cast<double>(k) / samples;
    if (!collides(at(s))) continue;
    double lo = static_cast<double>(k - 1) / samples;
    double hi = s;
    while ((hi - lo) * travel > kContactTolerance) {
      const double mid = 0.5 * (lo + hi);
      (collides(at(mid)) ? hi : lo) = mid;
    }
    return lo == 0.0 ? start : at(lo);
  }
  return at(1.0);
}

Termination World::check_termination() const {
  if (compute_reward(pose_, config_).success) return Termination::Success;
  if (step_index_ >= config_.max_steps) return Termination::StepLimit;
  if (wall_clearance(pose_, config_.robot_footprint, config_.enclosure_size) < config_.boundary_margin) {
    return Termination::Boundary;
  }
  return Termination::None;
}

StepResult World::step(const Action& action) {
  if (!active_) throw Error(ErrorCode::NoEpisode, "step called without an active episode; call reset first");
  check_action(action, config_.action_space);

  Pose2D jitter;
  if (config_.terrain_jitter.enabled) {
    std::normal_distribution<double> pos(0.0, config_.terrain_jitter.sigma_pos);
    std::normal_distribution<double> rot(0.0, config_.terrain_jitter.sigma_theta);
    jitter.x = pos(rng_);
    jitter.y = pos(rng_);
    jitter.theta = rot(rng_);
  }
  pose_ = resolve_motion(pose_, action, jitter);
  ++step_index_;

  StepResult result;
  result.info.step_index = step_index_;
  result.info.termination = check_termination();
  result.reward = result.info.termination == Termination::Success ? 1.0 : 0.0;
  result.done = result.info.termination != Termination::None;
  if (result.done) active_ = false;
  result.observation = render(pose_);
  return result;
}

std::uint8_t World::ground_intensity(double x, double y) const {
  const auto& s = config_.shading;
  const auto ix = static_cast<std::int64_t>(std::floor(x / s.ground_cell));
  const auto iy = static_cast<std::int64_t>(std::floor(y / s.ground_cell));
  const std::uint64_t h = splitmix64(texture_seed_ ^ splitmix64(static_cast<std::uint64_t>(ix) * 0x100000001b3ULL ^
                                                                 static_cast<std::uint64_t>(iy)));
  const int span = 2 * s.ground_noise + 1;
  const int value = s.ground_mean + static_cast<int>(h % static_cast<std::uint64_t>(span)) - s.ground_noise;
  return static_cast<std::uint8_t>(std::clamp(value, 0, 255));
}

std::uint8_t World::shade(const std::optional<RayHit>& hit) const {
  const auto& s = config_.shading;
  int value = s.background;
  if (hit) {
    switch (hit->material) {
      case Material::Ground: return ground_intensity(hit->point.x(), hit->point.y());
      case Material::Wall: value = s.wall; break;
      case Material::Monolith: value = s.monolith; break;
      case Material::Obstacle: value = s.obstacle; break;
    }
  }
  return static_cast<std::uint8_t>(std::clamp(value, 0, 255));
}

Observation World::render(const Pose2D& pose) const { return render_planes(pose, channels_); }

Observation World::render_planes(const Pose2D& pose, ChannelConfig channels) const {
  Observation obs;
  obs.channels = channels;
  obs.width = camera_.width();
  obs.height = camera_.height();
  const bool want_depth = has_depth(channels);
  const bool want_rgb = has_rgb(channels);
  if (want_depth) obs.depth.resize(obs.pixel_count());
  if (want_rgb) obs.rgb.resize(obs.pixel_count() * 3);

  const Eigen::Vector3d origin = camera_.origin(pose);
  const double cs = std::cos(pose.theta);
  const double sn = std::sin(pose.theta);
  const std::vector<double>& ups = camera_.ups();
  std::vector<std::optional<RayHit>> hits(ups.size());
  for (int u = 0; u < obs.width; ++u) {
    const double left = camera_.left(u);
    cast_column(scene_, origin, Eigen::Vector2d(cs - left * sn, sn + left * cs), ups, hits);
    for (int v = 0; v < obs.height; ++v) {
      const std::size_t i = static_cast<std::size_t>(v) * obs.width + u;
      const auto& hit = hits[static_cast<std::size_t>(v)];
      if (want_depth) obs.depth[i] = quantize_depth(hit, config_.camera.max_range);
      if (want_rgb) {
        const std::uint8_t g = shade(hit);
        obs.rgb[3 * i] = g;
        obs.rgb[3 * i + 1] = g;
        obs.rgb[3 * i + 2] = g;
      }
    }
  }
  return obs;
}

std::vector<std::uint16_t> World::render_depth(const Pose2D& pose) const {
  return render_planes(pose, ChannelConfig::DepthOnly).depth;
}

std::vector<std::uint8_t> World::render_rgb(const Pose2D& pose) const {
  return render_planes(pose, ChannelConfig::RgbOnly).rgb;
}

}  // namespace gymgate::sim
