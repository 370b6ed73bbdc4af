#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gymgate/sim/geometry.hpp"

namespace gymgate::sim {

enum class ActionSpace { Discrete, Continuous };

std::string_view to_string(ActionSpace space);

struct CameraConfig {
  double height = 0.22;                 // above the robot center, meters
  double horizontal_fov = 1.0471975511965976;  // 60 deg
  double vertical_fov = 0.7853981633974483;    // 45 deg
  int width = 320;
  int height_px = 240;
  double max_range = 5.0;
};

struct ActionParams {
  double linear_speed = 0.2;   // m/s, discrete Forward/Backward
  double angular_speed = 0.4;  // rad/s, discrete Left/Right
  double step_duration = 2.0;  // s
  double continuous_linear_bound = 0.5;
  double continuous_angular_bound = 1.0;
};

struct TerrainJitter {
  double sigma_pos = 0.01;
  double sigma_theta = 0.02;
  bool enabled = true;
};

// Flat-shading intensities for the RGB plane (gray levels, 0..255).
struct Shading {
  int monolith = 30;
  int wall = 120;
  int obstacle = 80;
  int ground_mean = 160;
  int ground_noise = 20;      // uniform +/- around ground_mean
  double ground_cell = 0.02;  // texture cell size, meters
  int background = 200;       // rays leaving the enclosure over the walls
};

struct WorldConfig {
  Enclosure enclosure_size;
  Box monolith{Eigen::Vector2d::Zero(), Eigen::Vector2d(0.15, 0.15), 1.2};
  std::vector<Box> obstacles;
  Footprint robot_footprint;
  CameraConfig camera;
  ActionSpace action_space = ActionSpace::Discrete;
  ActionParams action_params;
  double reward_radius = 0.40;
  int max_steps = 100;
  double boundary_margin = 0.10;
  TerrainJitter terrain_jitter;
  double spawn_min_monolith_distance = 0.60;
  int spawn_max_attempts = 10000;
  Shading shading;

  /// Open arena with the monolith at the center.
  static WorldConfig open_arena(ActionSpace space);
  /// Same arena plus the four-box obstacle layout.
  static WorldConfig obstacle_arena(ActionSpace space);
};

/// Throws Error{InvalidConfig} naming the first violated invariant.
void validate(const WorldConfig& config);

}  // namespace gymgate::sim
