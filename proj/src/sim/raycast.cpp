#include "gymgate/sim/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gymgate/sim/observation.hpp"

namespace gymgate::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Slab test against a solid box [min, max]. Returns the entry distance when
// the ray starts outside the box and enters it ahead of the origin.
std::optional<double> intersect_box(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi, const Eigen::Vector3d& o,
                                    const Eigen::Vector3d& d) {
  double t_enter = -kInf;
  double t_exit = kInf;
  for (int axis = 0; axis < 3; ++axis) {
    if (d[axis] == 0.0) {
      if (o[axis] < lo[axis] || o[axis] > hi[axis]) return std::nullopt;
      continue;
    }
    double t0 = (lo[axis] - o[axis]) / d[axis];
    double t1 = (hi[axis] - o[axis]) / d[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
  }
  if (t_enter > t_exit || t_enter < 0.0) return std::nullopt;
  return t_enter;
}

}  // namespace

Scene make_scene(const WorldConfig& config) {
  Scene scene;
  scene.enclosure = config.enclosure_size;
  scene.boxes.push_back({config.monolith, Material::Monolith});
  for (const auto& obstacle : config.obstacles) scene.boxes.push_back({obstacle, Material::Obstacle});
  return scene;
}

std::optional<RayHit> cast_ray(const Scene& scene, const Eigen::Vector3d& origin, const Eigen::Vector3d& direction) {
  double best = kInf;
  Material material = Material::Ground;

  const Eigen::Vector2d half = scene.enclosure.half_extents();
  if (direction.z() < 0.0) {
    const double t = -origin.z() / direction.z();
    const Eigen::Vector3d p = origin + t * direction;
    if (std::abs(p.x()) <= half.x() && std::abs(p.y()) <= half.y()) {
      best = t;
      material = Material::Ground;
    }
  }

  // Exit through the side of the enclosure prism.
  double t_wall = kInf;
  for (int axis = 0; axis < 2; ++axis) {
    if (direction[axis] > 0.0) {
      t_wall = std::min(t_wall, (half[axis] - origin[axis]) / direction[axis]);
    } else if (direction[axis] < 0.0) {
      t_wall = std::min(t_wall, (-half[axis] - origin[axis]) / direction[axis]);
    }
  }
  if (t_wall < best) {
    const double z = origin.z() + t_wall * direction.z();
    if (z >= 0.0 && z <= scene.enclosure.height) {
      best = t_wall;
      material = Material::Wall;
    }
  }

  for (const auto& [box, box_material] : scene.boxes) {
    const Eigen::Vector3d lo(box.center.x() - box.half_extents.x(), box.center.y() - box.half_extents.y(), 0.0);
    const Eigen::Vector3d hi(box.center.x() + box.half_extents.x(), box.center.y() + box.half_extents.y(),
                             box.height);
    if (auto t = intersect_box(lo, hi, origin, direction); t && *t < best) {
      best = *t;
      material = box_material;
    }
  }

  if (best == kInf) return std::nullopt;
  return RayHit{best, material, origin + best * direction};
}

void cast_column(const Scene& scene, const Eigen::Vector3d& origin, const Eigen::Vector2d& horizontal,
                 std::span<const double> slopes, std::span<std::optional<RayHit>> hits) {
  // Parameter s runs along the unnormalized direction; s is also the
  // horizontal distance in units of |horizontal|.
  const Eigen::Vector2d half = scene.enclosure.half_extents();
  double s_wall = kInf;
  for (int axis = 0; axis < 2; ++axis) {
    if (horizontal[axis] > 0.0) {
      s_wall = std::min(s_wall, (half[axis] - origin[axis]) / horizontal[axis]);
    } else if (horizontal[axis] < 0.0) {
      s_wall = std::min(s_wall, (-half[axis] - origin[axis]) / horizontal[axis]);
    }
  }

  struct Span {
    double enter, exit, height;
    Material material;
  };
  std::vector<Span> spans;
  spans.reserve(scene.boxes.size());
  for (const auto& [box, material] : scene.boxes) {
    double enter = -kInf, exit = kInf;
    bool missed = false;
    for (int axis = 0; axis < 2 && !missed; ++axis) {
      const double lo = box.center[axis] - box.half_extents[axis];
      const double hi = box.center[axis] + box.half_extents[axis];
      if (horizontal[axis] == 0.0) {
        missed = origin[axis] < lo || origin[axis] > hi;
        continue;
      }
      double t0 = (lo - origin[axis]) / horizontal[axis];
      double t1 = (hi - origin[axis]) / horizontal[axis];
      if (t0 > t1) std::swap(t0, t1);
      enter = std::max(enter, t0);
      exit = std::min(exit, t1);
    }
    if (!missed && enter <= exit && exit >= 0.0) spans.push_back({enter, exit, box.height, material});
  }

  const double h2 = horizontal.squaredNorm();
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    const double up = slopes[k];
    double best = kInf;
    Material material = Material::Ground;
    if (up < 0.0) {
      const double s = -origin.z() / up;
      const Eigen::Vector2d p = origin.head<2>() + s * horizontal;
      if (std::abs(p.x()) <= half.x() && std::abs(p.y()) <= half.y()) best = s;
    }
    if (s_wall < best) {
      const double z = origin.z() + s_wall * up;
      if (z >= 0.0 && z <= scene.enclosure.height) {
        best = s_wall;
        material = Material::Wall;
      }
    }
    for (const Span& b : spans) {
      double enter = b.enter, exit = b.exit;
      if (up == 0.0) {
        if (origin.z() < 0.0 || origin.z() > b.height) continue;
      } else {
        double t0 = -origin.z() / up;
        double t1 = (b.height - origin.z()) / up;
        if (t0 > t1) std::swap(t0, t1);
        enter = std::max(enter, t0);
        exit = std::min(exit, t1);
      }
      if (enter > exit || enter < 0.0 || enter >= best) continue;
      best = enter;
      material = b.material;
    }
    if (best == kInf) {
      hits[k].reset();
      continue;
    }
    const Eigen::Vector3d point(origin.x() + best * horizontal.x(), origin.y() + best * horizontal.y(),
                                origin.z() + best * up);
    hits[k] = RayHit{best * std::sqrt(h2 + up * up), material, point};
  }
}

PinholeCamera::PinholeCamera(const CameraConfig& config)
    : width_(config.width), height_(config.height_px), mount_height_(config.height) {
  const double fx = (width_ / 2.0) / std::tan(config.horizontal_fov / 2.0);
  const double fy = (height_ / 2.0) / std::tan(config.vertical_fov / 2.0);
  for (int u = 0; u < width_; ++u) lefts_.push_back(-((u + 0.5) - width_ / 2.0) / fx);
  for (int v = 0; v < height_; ++v) ups_.push_back((height_ / 2.0 - (v + 0.5)) / fy);
  directions_.reserve(static_cast<std::size_t>(width_) * height_);
  for (int v = 0; v < height_; ++v) {
    for (int u = 0; u < width_; ++u) {
      directions_.push_back(Eigen::Vector3d(1.0, lefts_[u], ups_[v]).normalized());
    }
  }
}

Eigen::Vector3d PinholeCamera::origin(const Pose2D& pose) const { return {pose.x, pose.y, mount_height_}; }

Eigen::Vector3d PinholeCamera::ray(int u, int v, double theta) const {
  const Eigen::Vector3d& c = directions_[static_cast<std::size_t>(v) * width_ + u];
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  return {c.x() * cs - c.y() * sn, c.x() * sn + c.y() * cs, c.z()};
}

std::uint16_t quantize_depth(const std::optional<RayHit>& hit, double max_range) {
  if (!hit || hit->distance > max_range) return kDepthNoHit;
  return static_cast<std::uint16_t>(std::lround(hit->distance * 1000.0));
}

}  // namespace gymgate::sim
