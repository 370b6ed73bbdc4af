#include "gymgate/gateway/env_registry.hpp"

#include "gymgate/error.hpp"

namespace gymgate::gateway {

const std::vector<EnvSpec>& env_specs() {
  static const std::vector<EnvSpec> specs = [] {
    std::vector<EnvSpec> out;
    for (bool obstacles : {false, true}) {
      for (auto space : {sim::ActionSpace::Discrete, sim::ActionSpace::Continuous}) {
        const std::string family = std::string(obstacles ? "MonolithObstacles" : "Monolith") +
                                   (space == sim::ActionSpace::Discrete ? "Discrete" : "Continuous");
        for (bool real : {false, true}) {
          out.push_back(EnvSpec{family + (real ? "Real" : "Sim") + "-v0", family, obstacles, real, space});
        }
      }
    }
    return out;
  }();
  return specs;
}

std::optional<EnvSpec> find_env(std::string_view name) {
  constexpr std::string_view kPrefix = "OffWorld";
  if (name.substr(0, kPrefix.size()) == kPrefix) name.remove_prefix(kPrefix.size());
  for (const auto& spec : env_specs()) {
    if (spec.name == name) return spec;
  }
  return std::nullopt;
}

std::string valid_env_names() {
  std::string out;
  for (const auto& spec : env_specs()) {
    if (!out.empty()) out += ", ";
    out += spec.name;
  }
  return out;
}

const EnvSpec& resolve_env(std::string_view name) {
  if (const auto found = find_env(name)) {
    for (const auto& spec : env_specs()) {
      if (spec.name == found->name) return spec;
    }
  }
  throw Error(ErrorCode::UnknownEnv, "unknown environment '" + std::string(name) + "'; valid names: " +
                                         valid_env_names());
}

sim::WorldConfig default_world_config(const EnvSpec& spec) {
  return spec.obstacles ? sim::WorldConfig::obstacle_arena(spec.action_space)
                        : sim::WorldConfig::open_arena(spec.action_space);
}

}  // namespace gymgate::gateway
