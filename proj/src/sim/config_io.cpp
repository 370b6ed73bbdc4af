#include "gymgate/sim/config_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "gymgate/error.hpp"

namespace gymgate::sim {

using nlohmann::json;

namespace {

json vec2(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }

json box_json(const Box& box) {
  return {{"center", vec2(box.center)}, {"footprint", vec2(box.half_extents)}, {"height", box.height}};
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) bad("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("bad value for '") + key + "'");
  }
}

void read_vec2(const json& j, const char* key, Eigen::Vector2d& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    bad(std::string("'") + key + "' must be a two-element number array");
  }
  out = {v[0].get<double>(), v[1].get<double>()};
}

Box read_box(const json& j, const char* where, Box box) {
  check_keys(j, where, {"center", "footprint", "height"});
  read_vec2(j, "center", box.center);
  read_vec2(j, "footprint", box.half_extents);
  read(j, "height", box.height);
  return box;
}

}  // namespace

json to_json(const WorldConfig& c) {
  json obstacles = json::array();
  for (const auto& o : c.obstacles) obstacles.push_back(box_json(o));
  return {
      {"enclosure_size",
       {{"width", c.enclosure_size.width}, {"length", c.enclosure_size.length}, {"height", c.enclosure_size.height}}},
      {"monolith", box_json(c.monolith)},
      {"obstacles", obstacles},
      {"robot_footprint",
       {{"half_width", c.robot_footprint.half_width}, {"half_length", c.robot_footprint.half_length}}},
      {"camera",
       {{"height", c.camera.height},
        {"horizontal_fov", c.camera.horizontal_fov},
        {"vertical_fov", c.camera.vertical_fov},
        {"width", c.camera.width},
        {"height_px", c.camera.height_px},
        {"max_range", c.camera.max_range}}},
      {"action_space", std::string(to_string(c.action_space))},
      {"action_params",
       {{"linear_speed", c.action_params.linear_speed},
        {"angular_speed", c.action_params.angular_speed},
        {"step_duration", c.action_params.step_duration},
        {"continuous_linear_bound", c.action_params.continuous_linear_bound},
        {"continuous_angular_bound", c.action_params.continuous_angular_bound}}},
      {"reward_radius", c.reward_radius},
      {"max_steps", c.max_steps},
      {"boundary_margin", c.boundary_margin},
      {"terrain_jitter",
       {{"sigma_pos", c.terrain_jitter.sigma_pos},
        {"sigma_theta", c.terrain_jitter.sigma_theta},
        {"enabled", c.terrain_jitter.enabled}}},
      {"spawn_min_monolith_distance", c.spawn_min_monolith_distance},
      {"spawn_max_attempts", c.spawn_max_attempts},
      {"shading",
       {{"monolith", c.shading.monolith},
        {"wall", c.shading.wall},
        {"obstacle", c.shading.obstacle},
        {"ground_mean", c.shading.ground_mean},
        {"ground_noise", c.shading.ground_noise},
        {"ground_cell", c.shading.ground_cell},
        {"background", c.shading.background}}},
  };
}

WorldConfig world_config_from_json(const json& j, const WorldConfig& base) {
  WorldConfig c = base;
  check_keys(j, "world config",
             {"enclosure_size", "monolith", "obstacles", "robot_footprint", "camera", "action_space", "action_params",
              "reward_radius", "max_steps", "boundary_margin", "terrain_jitter", "spawn_min_monolith_distance",
              "spawn_max_attempts", "shading"});

  if (j.contains("enclosure_size")) {
    const json& e = j["enclosure_size"];
    check_keys(e, "enclosure_size", {"width", "length", "height"});
    read(e, "width", c.enclosure_size.width);
    read(e, "length", c.enclosure_size.length);
    read(e, "height", c.enclosure_size.height);
  }
  if (j.contains("monolith")) c.monolith = read_box(j["monolith"], "monolith", c.monolith);
  if (j.contains("obstacles")) {
    if (!j["obstacles"].is_array()) bad("obstacles must be an array");
    c.obstacles.clear();
    for (const auto& o : j["obstacles"]) c.obstacles.push_back(read_box(o, "obstacle", Box{}));
  }
  if (j.contains("robot_footprint")) {
    const json& f = j["robot_footprint"];
    check_keys(f, "robot_footprint", {"half_width", "half_length"});
    read(f, "half_width", c.robot_footprint.half_width);
    read(f, "half_length", c.robot_footprint.half_length);
  }
  if (j.contains("camera")) {
    const json& cam = j["camera"];
    check_keys(cam, "camera", {"height", "horizontal_fov", "vertical_fov", "width", "height_px", "max_range"});
    read(cam, "height", c.camera.height);
    read(cam, "horizontal_fov", c.camera.horizontal_fov);
    read(cam, "vertical_fov", c.camera.vertical_fov);
    read(cam, "width", c.camera.width);
    read(cam, "height_px", c.camera.height_px);
    read(cam, "max_range", c.camera.max_range);
  }
  if (j.contains("action_space")) {
    std::string space;
    read(j, "action_space", space);
    if (space == "discrete") {
      c.action_space = ActionSpace::Discrete;
    } else if (space == "continuous") {
      c.action_space = ActionSpace::Continuous;
    } else {
      bad("action_space must be 'discrete' or 'continuous'");
    }
  }
  if (j.contains("action_params")) {
    const json& a = j["action_params"];
    check_keys(a, "action_params",
               {"linear_speed", "angular_speed", "step_duration", "continuous_linear_bound",
                "continuous_angular_bound"});
    read(a, "linear_speed", c.action_params.linear_speed);
    read(a, "angular_speed", c.action_params.angular_speed);
    read(a, "step_duration", c.action_params.step_duration);
    read(a, "continuous_linear_bound", c.action_params.continuous_linear_bound);
    read(a, "continuous_angular_bound", c.action_params.continuous_angular_bound);
  }
  read(j, "reward_radius", c.reward_radius);
  read(j, "max_steps", c.max_steps);
  read(j, "boundary_margin", c.boundary_margin);
  if (j.contains("terrain_jitter")) {
    const json& t = j["terrain_jitter"];
    check_keys(t, "terrain_jitter", {"sigma_pos", "sigma_theta", "enabled"});
    read(t, "sigma_pos", c.terrain_jitter.sigma_pos);
    read(t, "sigma_theta", c.terrain_jitter.sigma_theta);
    read(t, "enabled", c.terrain_jitter.enabled);
  }
  read(j, "spawn_min_monolith_distance", c.spawn_min_monolith_distance);
  read(j, "spawn_max_attempts", c.spawn_max_attempts);
  if (j.contains("shading")) {
    const json& s = j["shading"];
    check_keys(s, "shading",
               {"monolith", "wall", "obstacle", "ground_mean", "ground_noise", "ground_cell", "background"});
    read(s, "monolith", c.shading.monolith);
    read(s, "wall", c.shading.wall);
    read(s, "obstacle", c.shading.obstacle);
    read(s, "ground_mean", c.shading.ground_mean);
    read(s, "ground_noise", c.shading.ground_noise);
    read(s, "ground_cell", c.shading.ground_cell);
    read(s, "background", c.shading.background);
  }
  validate(c);
  return c;
}

WorldConfig load_world_config(const std::filesystem::path& path, const WorldConfig& base) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) bad("malformed JSON in " + path.string());
  return world_config_from_json(j, base);
}

void save_world_config(const std::filesystem::path& path, const WorldConfig& config) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << to_json(config).dump(2) << '\n';
}

}  // namespace gymgate::sim
