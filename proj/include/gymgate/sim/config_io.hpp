#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "gymgate/sim/world_config.hpp"

namespace gymgate::sim {

// JSON form of WorldConfig. Keys mirror the struct field names; points and
// extents are two-element arrays. Missing keys keep the value of `base`;
// unknown keys are rejected so typos do not silently fall back to defaults.

nlohmann::json to_json(const WorldConfig& config);
WorldConfig world_config_from_json(const nlohmann::json& j, const WorldConfig& base = {});

/// Reads and validates a config file. Throws Error{InvalidConfig}.
WorldConfig load_world_config(const std::filesystem::path& path, const WorldConfig& base = {});
void save_world_config(const std::filesystem::path& path, const WorldConfig& config);

}  // namespace gymgate::sim
