#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gymgate/gateway/jsonl.hpp"
#include "gymgate/gateway/time.hpp"

namespace gymgate::gateway {

struct EpisodeRecord {
  std::uint64_t episode_index = 0;
  double total_reward = 0.0;
  int steps = 0;
  TimePoint ended_at;

  bool operator==(const EpisodeRecord&) const = default;
};

struct Experiment {
  std::string name;
  std::string owner;
  std::string env_name;
  TimePoint created_at;
  std::vector<EpisodeRecord> episodes;

  bool operator==(const Experiment&) const = default;
};

/// Experiments and their append-only episode logs, backed by
/// experiments.jsonl. Names are unique per owner.
class ExperimentStore {
 public:
  explicit ExperimentStore(const std::filesystem::path& file);

  /// resume = false creates the experiment (NameTaken if it exists);
  /// resume = true returns the existing one (NotFound otherwise). Resuming
  /// under a different env is a BadRequest.
  Experiment register_experiment(const std::string& owner, const std::string& name, bool resume,
                                 const std::string& env_name, TimePoint now = Clock::now());

  /// Appends the next episode and syncs it to disk before returning the
  /// updated experiment. StorageFailure if the write fails.
  Experiment record_episode(const std::string& owner, const std::string& name, double total_reward, int steps,
                            TimePoint now = Clock::now());

  std::optional<Experiment> find(const std::string& owner, const std::string& name);
  std::vector<Experiment> all();

 private:
  using Key = std::pair<std::string, std::string>;  // owner, name
  void refresh_locked();

  std::mutex mutex_;
  JsonlFile file_;
  std::map<Key, Experiment> experiments_;
};

}  // namespace gymgate::gateway
