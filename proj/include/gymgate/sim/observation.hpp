#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace gymgate::sim {

enum class ChannelConfig { DepthOnly, RgbOnly, Rgbd };

std::string_view to_string(ChannelConfig channels);
std::optional<ChannelConfig> channel_config_from_string(std::string_view name);

constexpr bool has_depth(ChannelConfig c) { return c != ChannelConfig::RgbOnly; }
constexpr bool has_rgb(ChannelConfig c) { return c != ChannelConfig::DepthOnly; }
/// Channel count as seen by an RL agent: depth = 1, rgb = 3, rgbd = 4.
constexpr int channel_count(ChannelConfig c) {
  return c == ChannelConfig::DepthOnly ? 1 : (c == ChannelConfig::RgbOnly ? 3 : 4);
}

inline constexpr std::uint16_t kDepthNoHit = std::numeric_limits<std::uint16_t>::max();

/// Row-major planes, row 0 at the top of the image. Planes that the channel
/// configuration excludes are empty.
struct Observation {
  ChannelConfig channels = ChannelConfig::Rgbd;
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> depth;  // millimeters, kDepthNoHit when nothing within range
  std::vector<std::uint8_t> rgb;     // interleaved r, g, b

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }

  bool operator==(const Observation&) const = default;
};

enum class Termination { None, Success, StepLimit, Boundary };

std::string_view to_string(Termination termination);
std::optional<Termination> termination_from_string(std::string_view name);

struct StepInfo {
  int step_index = 0;
  Termination termination = Termination::None;

  bool operator==(const StepInfo&) const = default;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;

  bool operator==(const StepResult&) const = default;
};

}  // namespace gymgate::sim
