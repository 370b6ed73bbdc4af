#include "gymgate/sim/world_config.hpp"

#include <cmath>
#include <numbers>

#include "gymgate/error.hpp"

namespace gymgate::sim {

std::string_view to_string(ActionSpace space) {
  return space == ActionSpace::Discrete ? "discrete" : "continuous";
}

WorldConfig WorldConfig::open_arena(ActionSpace space) {
  WorldConfig config;
  config.action_space = space;
  return config;
}

WorldConfig WorldConfig::obstacle_arena(ActionSpace space) {
  WorldConfig config = open_arena(space);
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      config.obstacles.push_back(Box{Eigen::Vector2d(0.8 * sx, 1.0 * sy), Eigen::Vector2d(0.2, 0.2), 0.5});
    }
  }
  return config;
}

namespace {

void require(bool condition, const char* what) {
  if (!condition) throw Error(ErrorCode::InvalidConfig, what);
}

bool positive_box(const Box& box) {
  return box.half_extents.x() > 0.0 && box.half_extents.y() > 0.0 && box.height > 0.0;
}

}  // namespace

void validate(const WorldConfig& c) {
  const auto& e = c.enclosure_size;
  require(e.width > 0.0 && e.length > 0.0 && e.height > 0.0, "enclosure dimensions must be positive");
  require(point_wall_clearance(c.monolith.center, e) > 0.0, "monolith center must lie inside the enclosure");
  require(positive_box(c.monolith), "monolith extents must be positive");
  require(box_inside_enclosure(c.monolith, e), "monolith must lie fully inside the enclosure");
  for (const auto& obstacle : c.obstacles) {
    require(positive_box(obstacle), "obstacle extents must be positive");
    require(box_inside_enclosure(obstacle, e), "every obstacle must lie fully inside the enclosure");
  }
  require(c.robot_footprint.half_width > 0.0 && c.robot_footprint.half_length > 0.0,
          "robot footprint must be positive");

  const auto& cam = c.camera;
  require(cam.width > 0 && cam.height_px > 0 && cam.width <= 4096 && cam.height_px <= 4096,
          "camera resolution must be in 1..4096");
  require(cam.horizontal_fov > 0.0 && cam.horizontal_fov < std::numbers::pi && cam.vertical_fov > 0.0 &&
              cam.vertical_fov < std::numbers::pi,
          "camera fields of view must be in (0, pi)");
  require(cam.height > 0.0, "camera height must be positive");
  require(cam.max_range > 0.0 && cam.max_range * 1000.0 < 65535.0, "max_range must fit 16-bit millimeters");

  const auto& a = c.action_params;
  require(a.step_duration > 0.0, "step_duration must be positive");
  require(a.linear_speed >= 0.0 && a.angular_speed >= 0.0 && a.continuous_linear_bound >= 0.0 &&
              a.continuous_angular_bound >= 0.0,
          "action speeds and bounds must be non-negative");

  require(c.reward_radius > 0.0, "reward_radius must be positive");
  require(c.max_steps >= 1, "max_steps must be at least 1");
  require(c.boundary_margin >= 0.0, "boundary_margin must be non-negative");
  require(c.spawn_min_monolith_distance > c.reward_radius,
          "spawn_min_monolith_distance must exceed reward_radius");
  require(c.spawn_max_attempts >= 1, "spawn_max_attempts must be at least 1");
  require(c.terrain_jitter.sigma_pos >= 0.0 && c.terrain_jitter.sigma_theta >= 0.0,
          "terrain jitter sigmas must be non-negative");
  require(c.shading.ground_cell > 0.0, "ground texture cell must be positive");
}

}  // namespace gymgate::sim
