#include "gymgate/sim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gymgate::sim {

double normalize_angle(double angle) {
  if (angle >= -std::numbers::pi && angle < std::numbers::pi) return angle;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(angle + std::numbers::pi, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  wrapped -= std::numbers::pi;
  if (wrapped >= std::numbers::pi) wrapped -= kTwoPi;
  return wrapped;
}

Eigen::Vector2d Pose2D::heading() const { return {std::cos(theta), std::sin(theta)}; }

double Footprint::circumradius() const { return std::hypot(half_width, half_length); }

std::array<Eigen::Vector2d, 4> footprint_corners(const Pose2D& pose, const Footprint& footprint) {
  const Eigen::Vector2d forward = pose.heading() * footprint.half_length;
  const Eigen::Vector2d left = Eigen::Vector2d(-std::sin(pose.theta), std::cos(pose.theta)) * footprint.half_width;
  const Eigen::Vector2d c = pose.position();
  return {c + forward + left, c - forward + left, c - forward - left, c + forward - left};
}

bool footprint_overlaps_box(const Pose2D& pose, const Footprint& footprint, const Box& box) {
  const Eigen::Vector2d delta = pose.position() - box.center;
  const Eigen::Vector2d u = pose.heading();
  const Eigen::Vector2d w(-u.y(), u.x());

  // Box axes.
  const double extent_x = std::abs(u.x()) * footprint.half_length + std::abs(w.x()) * footprint.half_width;
  if (std::abs(delta.x()) >= box.half_extents.x() + extent_x) return false;
  const double extent_y = std::abs(u.y()) * footprint.half_length + std::abs(w.y()) * footprint.half_width;
  if (std::abs(delta.y()) >= box.half_extents.y() + extent_y) return false;

  // Footprint axes.
  const double box_on_u = std::abs(u.x()) * box.half_extents.x() + std::abs(u.y()) * box.half_extents.y();
  if (std::abs(delta.dot(u)) >= footprint.half_length + box_on_u) return false;
  const double box_on_w = std::abs(w.x()) * box.half_extents.x() + std::abs(w.y()) * box.half_extents.y();
  if (std::abs(delta.dot(w)) >= footprint.half_width + box_on_w) return false;

  return true;
}

double point_wall_clearance(const Eigen::Vector2d& point, const Enclosure& enclosure) {
  const Eigen::Vector2d half = enclosure.half_extents();
  return std::min(half.x() - std::abs(point.x()), half.y() - std::abs(point.y()));
}

double wall_clearance(const Pose2D& pose, const Footprint& footprint, const Enclosure& enclosure) {
  double clearance = std::numeric_limits<double>::infinity();
  for (const auto& corner : footprint_corners(pose, footprint)) {
    clearance = std::min(clearance, point_wall_clearance(corner, enclosure));
  }
  return clearance;
}

bool box_inside_enclosure(const Box& box, const Enclosure& enclosure) {
  const Eigen::Vector2d half = enclosure.half_extents();
  return (box.min_corner().array() >= -half.array()).all() && (box.max_corner().array() <= half.array()).all();
}

}  // namespace gymgate::sim
