#include "gymgate/client/policies.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <vector>

#include "gymgate/error.hpp"

namespace gymgate::client {

namespace {

std::array<double, 2> bounds_or_default(const std::optional<std::array<double, 2>>& bounds) {
  if (bounds) return *bounds;
  const sim::ActionParams p;
  return {p.continuous_linear_bound, p.continuous_angular_bound};
}

double wrap_angle(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

}  // namespace

RandomPolicy::RandomPolicy(sim::ActionSpace space, std::optional<std::array<double, 2>> bounds, std::uint64_t seed)
    : space_(space), bounds_(bounds_or_default(bounds)), rng_(seed) {}

sim::Action RandomPolicy::act(const Transition&) {
  if (space_ == sim::ActionSpace::Discrete) {
    std::uniform_int_distribution<int> pick(0, 3);
    return static_cast<sim::DiscreteAction>(pick(rng_));
  }
  std::uniform_real_distribution<double> lin(-bounds_[0], bounds_[0]);
  std::uniform_real_distribution<double> ang(-bounds_[1], bounds_[1]);
  const double linear = lin(rng_);
  return sim::ContinuousAction{linear, ang(rng_)};
}

ServoParams servo_params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "servo parameters must be a JSON object");
  static const std::set<std::string> known = {"dark_threshold", "min_target_pixels", "range_jump",
                                              "min_top_height", "max_top_height",    "max_target_width",
                                              "turn_threshold", "cruise_fraction"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::InvalidConfig, "unknown servo parameter '" + key + "'");
  }
  ServoParams p;
  try {
    p.dark_threshold = j.value("dark_threshold", p.dark_threshold);
    p.min_target_pixels = j.value("min_target_pixels", p.min_target_pixels);
    p.range_jump = j.value("range_jump", p.range_jump);
    p.min_top_height = j.value("min_top_height", p.min_top_height);
    p.max_top_height = j.value("max_top_height", p.max_top_height);
    p.max_target_width = j.value("max_target_width", p.max_target_width);
    p.turn_threshold = j.value("turn_threshold", p.turn_threshold);
    p.cruise_fraction = j.value("cruise_fraction", p.cruise_fraction);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("servo parameters: ") + e.what());
  }
  if (p.range_jump <= 0 || p.min_top_height >= p.max_top_height || p.max_target_width <= 0 ||
      p.turn_threshold <= 0 || p.cruise_fraction < 0 || p.cruise_fraction > 1) {
    throw Error(ErrorCode::InvalidConfig, "servo parameters out of range");
  }
  return p;
}

ServoParams load_servo_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  try {
    return servo_params_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

ServoPolicy::ServoPolicy(sim::ActionSpace space, std::optional<std::array<double, 2>> bounds, ServoParams params)
    : space_(space), bounds_(bounds_or_default(bounds)), params_(params) {}

double ServoPolicy::column_bearing(double u, int width) const {
  const double fx = (width / 2.0) / std::tan(params_.camera.horizontal_fov / 2.0);
  return std::atan((width / 2.0 - u) / fx);
}

std::optional<double> ServoPolicy::rgb_target(const sim::Observation& obs) const {
  // Only rows above the horizon: the ground is never that dark but may be close.
  double sum_u = 0.0;
  int count = 0;
  for (int v = 0; v < obs.height / 2; ++v) {
    for (int u = 0; u < obs.width; ++u) {
      const std::size_t i = 3 * (static_cast<std::size_t>(v) * obs.width + u);
      const int gray = (obs.rgb[i] + obs.rgb[i + 1] + obs.rgb[i + 2]) / 3;
      if (gray < params_.dark_threshold) {
        sum_u += u + 0.5;
        ++count;
      }
    }
  }
  if (count < params_.min_target_pixels) return std::nullopt;
  return column_bearing(sum_u / count, obs.width);
}

// The monolith shows up in the row just above the horizon as a narrow run of
// near ranges with farther surfaces on both sides, and it stands taller than
// the obstacles.
std::optional<double> ServoPolicy::depth_target(const sim::Observation& obs) const {
  const auto& cam = params_.camera;
  const double fx = (obs.width / 2.0) / std::tan(cam.horizontal_fov / 2.0);
  const double fy = (obs.height / 2.0) / std::tan(cam.vertical_fov / 2.0);
  const double inf = std::numeric_limits<double>::infinity();

  // Horizontal range and height of the surface seen by pixel (u, v).
  auto sample = [&](int u, int v, double& range, double& height) {
    const std::uint16_t d = obs.depth[static_cast<std::size_t>(v) * obs.width + u];
    if (d == sim::kDepthNoHit) return false;
    const double left = -((u + 0.5) - obs.width / 2.0) / fx;
    const double up = (obs.height / 2.0 - (v + 0.5)) / fy;
    const double norm = std::sqrt(1.0 + left * left + up * up);
    const double meters = d / 1000.0;
    range = meters * std::sqrt(1.0 + left * left) / norm;
    height = cam.height + meters * up / norm;
    return true;
  };

  const int row = obs.height / 2 - 1;
  std::vector<double> range(static_cast<std::size_t>(obs.width), inf);
  std::vector<bool> tall(static_cast<std::size_t>(obs.width), false);
  for (int u = 0; u < obs.width; ++u) {
    double r = 0, h = 0;
    if (!sample(u, row, r, h)) continue;
    range[static_cast<std::size_t>(u)] = r;
    double top = h;
    bool reached_top = true;
    for (int v = row - 1; v >= 0; --v) {
      double rv = 0, hv = 0;
      if (!sample(u, v, rv, hv) || std::abs(rv - r) > params_.range_jump) {
        reached_top = false;
        break;
      }
      top = hv;
    }
    // A surface still present in the top row is at least as tall as the view.
    tall[static_cast<std::size_t>(u)] =
        reached_top || (top >= params_.min_top_height && top <= params_.max_top_height);
  }

  std::optional<double> best_bearing;
  double best_range = inf;
  int u0 = 0;
  while (u0 < obs.width) {
    int u1 = u0;
    auto at = [&](int u) { return range[static_cast<std::size_t>(u)]; };
    while (u1 + 1 < obs.width && std::abs(at(u1 + 1) - at(u1)) <= params_.range_jump) ++u1;
    const bool left_edge = u0 == 0 || at(u0 - 1) > at(u0) + params_.range_jump;
    const bool right_edge = u1 == obs.width - 1 || at(u1 + 1) > at(u1) + params_.range_jump;
    const bool any_jump = u0 > 0 || u1 < obs.width - 1;
    if (at(u0) < inf && left_edge && right_edge && any_jump) {
      double sum = 0.0;
      int n_tall = 0;
      for (int u = u0; u <= u1; ++u) {
        sum += at(u);
        n_tall += tall[static_cast<std::size_t>(u)];
      }
      const int n = u1 - u0 + 1;
      const double mean = sum / n;
      const double width = n / fx * mean;
      if (width <= params_.max_target_width && 2 * n_tall > n && mean < best_range) {
        best_range = mean;
        best_bearing = column_bearing((u0 + u1 + 1) / 2.0, obs.width);
      }
    }
    u0 = u1 + 1;
  }
  return best_bearing;
}

std::optional<double> ServoPolicy::target_bearing(const sim::Observation& obs) const {
  if (sim::has_rgb(obs.channels) && !obs.rgb.empty()) return rgb_target(obs);
  if (sim::has_depth(obs.channels) && !obs.depth.empty()) return depth_target(obs);
  return std::nullopt;
}

sim::Action ServoPolicy::act(const Transition& last) {
  const std::optional<double> bearing = target_bearing(last.observation);
  if (space_ == sim::ActionSpace::Discrete) {
    if (!bearing || *bearing > params_.turn_threshold) return sim::DiscreteAction::Left;
    if (*bearing < -params_.turn_threshold) return sim::DiscreteAction::Right;
    return sim::DiscreteAction::Forward;
  }
  if (!bearing) return sim::ContinuousAction{0.0, bounds_[1]};
  const double angular = std::clamp(*bearing / params_.action.step_duration, -bounds_[1], bounds_[1]);
  const double linear = std::abs(*bearing) <= params_.turn_threshold ? params_.cruise_fraction * bounds_[0] : 0.0;
  return sim::ContinuousAction{linear, angular};
}

OraclePolicy::OraclePolicy(sim::ActionSpace space, sim::ActionParams params) : space_(space), params_(params) {}

sim::Action OraclePolicy::act(const Transition& last) {
  if (!last.debug) throw Error(ErrorCode::BadRequest, "oracle policy needs a server started with debug pose");
  const auto& d = *last.debug;
  const double dx = d.monolith_x - d.x;
  const double dy = d.monolith_y - d.y;
  const double bearing = wrap_angle(std::atan2(dy, dx) - d.theta);
  const double dist = std::hypot(dx, dy);
  if (space_ == sim::ActionSpace::Discrete) {
    // Turn while the error exceeds half of one discrete turn.
    const double half_turn = params_.angular_speed * params_.step_duration / 2.0;
    if (bearing > half_turn) return sim::DiscreteAction::Left;
    if (bearing < -half_turn) return sim::DiscreteAction::Right;
    return sim::DiscreteAction::Forward;
  }
  const double angular = std::clamp(bearing / params_.step_duration, -params_.continuous_angular_bound,
                                    params_.continuous_angular_bound);
  double linear = 0.0;
  if (std::abs(bearing) < 0.3) {
    linear = std::clamp((dist - 0.3) / params_.step_duration, 0.0, params_.continuous_linear_bound);
  }
  return sim::ContinuousAction{linear, angular};
}

std::optional<PolicyKind> policy_kind_from_string(std::string_view name) {
  if (name == "random") return PolicyKind::Random;
  if (name == "servo") return PolicyKind::Servo;
  if (name == "oracle") return PolicyKind::Oracle;
  return std::nullopt;
}

std::unique_ptr<Policy> make_policy(PolicyKind kind, const EnvEndpoint& env, std::uint64_t seed,
                                    const ServoParams& servo) {
  switch (kind) {
    case PolicyKind::Random: return std::make_unique<RandomPolicy>(env.action_space(), env.action_bounds(), seed);
    case PolicyKind::Servo: return std::make_unique<ServoPolicy>(env.action_space(), env.action_bounds(), servo);
    case PolicyKind::Oracle: {
      sim::ActionParams params;
      if (const auto b = env.action_bounds()) {
        params.continuous_linear_bound = (*b)[0];
        params.continuous_angular_bound = (*b)[1];
      }
      return std::make_unique<OraclePolicy>(env.action_space(), params);
    }
  }
  throw Error(ErrorCode::BadRequest, "unknown policy");
}

}  // namespace gymgate::client
