#include "gymgate/gateway/leaderboard.hpp"

#include <algorithm>
#include <tuple>

#include "gymgate/error.hpp"

namespace gymgate::gateway {

std::optional<double> best_window_average(const std::vector<double>& values, std::size_t window) {
  if (window == 0 || values.size() < window) return std::nullopt;
  // Integer rewards keep the running sum exact.
  double sum = 0.0;
  for (std::size_t i = 0; i < window; ++i) sum += values[i];
  double best = sum;
  for (std::size_t i = window; i < values.size(); ++i) {
    sum += values[i] - values[i - window];
    best = std::max(best, sum);
  }
  return best / static_cast<double>(window);
}

bool ranks_before(const protocol::LeaderboardEntry& a, const protocol::LeaderboardEntry& b) {
  if (a.best_window_avg != b.best_window_avg) return a.best_window_avg > b.best_window_avg;
  return std::tie(a.episodes_count, a.last_updated_ms, a.owner, a.experiment_name) <
         std::tie(b.episodes_count, b.last_updated_ms, b.owner, b.experiment_name);
}

Leaderboard::Leaderboard(const std::filesystem::path& file) : file_(file) {
  std::lock_guard lock(mutex_);
  refresh_locked();
}

void Leaderboard::refresh_locked() {
  for (const auto& r : file_.read_new()) {
    try {
      protocol::LeaderboardEntry e;
      e.experiment_name = r.at("experiment_name").get<std::string>();
      e.owner = r.at("owner").get<std::string>();
      e.env_name = r.at("env_name").get<std::string>();
      e.episodes_count = r.at("episodes_count").get<std::uint64_t>();
      e.best_window_avg = r.at("best_window_avg").get<double>();
      e.last_updated_ms = r.at("last_updated_ms").get<std::int64_t>();
      entries_[{e.owner, e.experiment_name}] = e;
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::StorageFailure, file_.path().string() + ": malformed leaderboard record: " + ex.what());
    }
  }
}

protocol::LeaderboardEntry Leaderboard::entry_for(const Experiment& e, double best) {
  protocol::LeaderboardEntry entry;
  entry.experiment_name = e.name;
  entry.owner = e.owner;
  entry.env_name = e.env_name;
  entry.episodes_count = e.episodes.size();
  entry.best_window_avg = best;
  entry.last_updated_ms = e.episodes.empty() ? to_unix_ms(e.created_at) : to_unix_ms(e.episodes.back().ended_at);
  return entry;
}

std::optional<protocol::LeaderboardEntry> Leaderboard::update(const Experiment& experiment) {
  std::vector<double> rewards;
  rewards.reserve(experiment.episodes.size());
  for (const auto& ep : experiment.episodes) rewards.push_back(ep.total_reward);
  const auto best = best_window_average(rewards);
  if (!best) return std::nullopt;
  const auto entry = entry_for(experiment, *best);
  std::lock_guard lock(mutex_);
  file_.locked([&] {
    refresh_locked();
    file_.append({{"experiment_name", entry.experiment_name},
                  {"owner", entry.owner},
                  {"env_name", entry.env_name},
                  {"episodes_count", entry.episodes_count},
                  {"best_window_avg", entry.best_window_avg},
                  {"last_updated_ms", entry.last_updated_ms}});
    refresh_locked();
  });
  return entry;
}

std::size_t Leaderboard::reconcile(const std::vector<Experiment>& experiments) {
  std::size_t repaired = 0;
  for (const auto& e : experiments) {
    if (e.episodes.size() < kLeaderboardWindow) continue;
    bool stale = true;
    {
      std::lock_guard lock(mutex_);
      refresh_locked();
      const auto it = entries_.find({e.owner, e.name});
      stale = it == entries_.end() || it->second.episodes_count != e.episodes.size();
    }
    if (stale) {
      update(e);
      ++repaired;
    }
  }
  return repaired;
}

std::vector<protocol::LeaderboardEntry> Leaderboard::top(std::size_t n) {
  std::lock_guard lock(mutex_);
  refresh_locked();
  std::vector<protocol::LeaderboardEntry> out;
  for (const auto& [key, e] : entries_) out.push_back(e);
  std::sort(out.begin(), out.end(), ranks_before);
  if (out.size() > n) out.resize(n);
  return out;
}

}  // namespace gymgate::gateway
