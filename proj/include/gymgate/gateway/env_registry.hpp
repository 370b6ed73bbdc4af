#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gymgate/sim/world_config.hpp"

namespace gymgate::gateway {

struct EnvSpec {
  std::string name;    // canonical, e.g. "MonolithDiscreteSim-v0"
  std::string family;  // e.g. "MonolithDiscrete"
  bool obstacles = false;
  bool real = false;  // "Real" names run paced
  sim::ActionSpace action_space = sim::ActionSpace::Discrete;
};

/// The eight environment names: four variants, each as Sim and Real.
const std::vector<EnvSpec>& env_specs();

/// Looks up a name, also accepting the "OffWorld" prefix used by the gym
/// registrations ("OffWorldMonolithDiscreteSim-v0").
std::optional<EnvSpec> find_env(std::string_view name);

/// Like find_env but throws UnknownEnv listing the valid names.
const EnvSpec& resolve_env(std::string_view name);

std::string valid_env_names();

/// Built-in world for an environment family.
sim::WorldConfig default_world_config(const EnvSpec& spec);

}  // namespace gymgate::gateway
