#pragma once

#include <array>

#include <Eigen/Core>

namespace gymgate::sim {

// Enclosure frame: origin at the enclosure center, x across the width,
// y along the length, z up. Angles are counter-clockwise from +x.

/// Wraps an angle into [-pi, pi).
double normalize_angle(double angle);

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Eigen::Vector2d position() const { return {x, y}; }
  Eigen::Vector2d heading() const;

  bool operator==(const Pose2D&) const = default;
};

/// Axis-aligned box resting on the ground plane.
struct Box {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  Eigen::Vector2d half_extents = Eigen::Vector2d::Zero();
  double height = 0.0;

  Eigen::Vector2d min_corner() const { return center - half_extents; }
  Eigen::Vector2d max_corner() const { return center + half_extents; }
};

/// The walled arena, spanning [-width/2, width/2] x [-length/2, length/2].
struct Enclosure {
  double width = 3.0;
  double length = 4.0;
  double height = 2.0;  // wall height

  Eigen::Vector2d half_extents() const { return {width / 2.0, length / 2.0}; }
};

/// Robot body rectangle. half_length runs along the heading.
struct Footprint {
  double half_width = 0.10;
  double half_length = 0.1175;

  double circumradius() const;
};

/// Corners in counter-clockwise order starting front-left.
std::array<Eigen::Vector2d, 4> footprint_corners(const Pose2D& pose, const Footprint& footprint);

/// Separating-axis test between the oriented footprint and a box footprint.
/// Touching boundaries do not count as overlap.
bool footprint_overlaps_box(const Pose2D& pose, const Footprint& footprint, const Box& box);

/// Signed distance from the footprint to the nearest wall, negative when a
/// corner lies outside the enclosure.
double wall_clearance(const Pose2D& pose, const Footprint& footprint, const Enclosure& enclosure);

/// Signed distance from a point to the nearest wall.
double point_wall_clearance(const Eigen::Vector2d& point, const Enclosure& enclosure);

bool box_inside_enclosure(const Box& box, const Enclosure& enclosure);

}  // namespace gymgate::sim
