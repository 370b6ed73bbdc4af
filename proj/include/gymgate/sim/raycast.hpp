#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gymgate/sim/geometry.hpp"
#include "gymgate/sim/world_config.hpp"

namespace gymgate::sim {

enum class Material : std::uint8_t { Ground, Wall, Monolith, Obstacle };

struct SceneBox {
  Box box;
  Material material = Material::Obstacle;
};

/// Everything a camera ray can hit: ground plane, the four inner wall
/// faces, and solid boxes. No ceiling.
struct Scene {
  Enclosure enclosure;
  std::vector<SceneBox> boxes;
};

Scene make_scene(const WorldConfig& config);

struct RayHit {
  double distance = 0.0;  // along the unit ray direction
  Material material = Material::Ground;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
};

/// Nearest intersection of the ray with the scene. `direction` must be unit length.
std::optional<RayHit> cast_ray(const Scene& scene, const Eigen::Vector3d& origin, const Eigen::Vector3d& direction);

/// Casts all rays of one image column. Every ray starts at `origin` and
/// points along (horizontal.x, horizontal.y, slopes[k]) before
/// normalization, so the footprint crossings are shared by the column and
/// only the height test runs per ray. Same hits as cast_ray on each ray.
void cast_column(const Scene& scene, const Eigen::Vector3d& origin, const Eigen::Vector2d& horizontal,
                 std::span<const double> slopes, std::span<std::optional<RayHit>> hits);

/// Pinhole camera riding on the robot. Pixel (u, v) has its center at
/// (u + 0.5, v + 0.5); v = 0 is the top row; the optical axis points along
/// the robot heading, parallel to the ground.
class PinholeCamera {
 public:
  explicit PinholeCamera(const CameraConfig& config);

  int width() const { return width_; }
  int height() const { return height_; }

  Eigen::Vector3d origin(const Pose2D& pose) const;
  /// Unit ray direction in the enclosure frame.
  Eigen::Vector3d ray(int u, int v, double theta) const;
  /// Unit ray direction in camera axes (forward, left, up).
  const Eigen::Vector3d& camera_direction(int u, int v) const {
    return directions_[static_cast<std::size_t>(v) * width_ + u];
  }
  /// Column u looks along (1, left(u)) in camera axes; row v rises up(v)
  /// per unit of forward travel.
  double left(int u) const { return lefts_[static_cast<std::size_t>(u)]; }
  const std::vector<double>& ups() const { return ups_; }

 private:
  int width_;
  int height_;
  double mount_height_;
  // Per-pixel unit direction in camera axes (forward, left, up).
  std::vector<Eigen::Vector3d> directions_;
  std::vector<double> lefts_;
  std::vector<double> ups_;
};

/// Distance in meters to the 16-bit millimeter wire value.
std::uint16_t quantize_depth(const std::optional<RayHit>& hit, double max_range);

}  // namespace gymgate::sim
