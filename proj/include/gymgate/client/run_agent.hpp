#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "gymgate/client/endpoint.hpp"
#include "gymgate/client/policies.hpp"

namespace gymgate::client {

struct EpisodeSummary {
  int episode_index = 0;
  double reward = 0.0;
  int steps = 0;
  sim::Termination termination = sim::Termination::None;

  bool operator==(const EpisodeSummary&) const = default;
};

struct RunSummary {
  std::vector<EpisodeSummary> episodes;

  /// Fraction of episodes that ended in Success; 0 with no episodes.
  double success_rate() const;
};

inline constexpr const char* kSummaryCsvHeader = "episode_index,reward,steps,termination";

/// Runs `episodes` reset/step loops. When `csv` is given the header goes out
/// first and each episode's row is flushed as it completes, so an error
/// part way leaves the finished episodes on disk before it propagates.
RunSummary run_agent(EnvEndpoint& env, Policy& policy, int episodes, std::ostream* csv = nullptr);

/// Writes depth.pgm and/or rgb.ppm for the planes present; returns the
/// paths written. Throws IoFailure.
std::vector<std::filesystem::path> dump_observation(const sim::Observation& obs, const std::filesystem::path& dir);

}  // namespace gymgate::client
