#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gymgate/gateway/experiments.hpp"
#include "gymgate/gateway/jsonl.hpp"
#include "gymgate/protocol/message.hpp"

namespace gymgate::gateway {

inline constexpr std::size_t kLeaderboardWindow = 100;

/// Highest mean over any contiguous window of `window` values, or nothing
/// when there are fewer values than that.
std::optional<double> best_window_average(const std::vector<double>& values, std::size_t window = kLeaderboardWindow);

/// Rank order: best window descending, then fewer episodes, then earlier
/// update, then owner and name for a total order.
bool ranks_before(const protocol::LeaderboardEntry& a, const protocol::LeaderboardEntry& b);

/// Leaderboard entries backed by leaderboard.jsonl; the newest record for an
/// experiment wins on replay.
class Leaderboard {
 public:
  explicit Leaderboard(const std::filesystem::path& file);

  /// Recomputes the experiment's entry from its full episode log and
  /// persists it. No-op below the window size. Returns the entry if any.
  std::optional<protocol::LeaderboardEntry> update(const Experiment& experiment);

  /// Rewrites entries that disagree with the experiment logs, e.g. after a
  /// crash between an episode write and the matching leaderboard write.
  /// Returns how many entries were repaired.
  std::size_t reconcile(const std::vector<Experiment>& experiments);

  std::vector<protocol::LeaderboardEntry> top(std::size_t n);

 private:
  using Key = std::pair<std::string, std::string>;  // owner, experiment name
  void refresh_locked();
  static protocol::LeaderboardEntry entry_for(const Experiment& e, double best);

  std::mutex mutex_;
  JsonlFile file_;
  std::map<Key, protocol::LeaderboardEntry> entries_;
};

}  // namespace gymgate::gateway
