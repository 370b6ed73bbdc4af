#include "gymgate/gateway/experiments.hpp"

#include "gymgate/error.hpp"

namespace gymgate::gateway {

ExperimentStore::ExperimentStore(const std::filesystem::path& file) : file_(file) {
  std::lock_guard lock(mutex_);
  refresh_locked();
}

void ExperimentStore::refresh_locked() {
  for (const auto& r : file_.read_new()) {
    try {
      const std::string kind = r.at("kind").get<std::string>();
      const Key key{r.at("owner").get<std::string>(), r.at("name").get<std::string>()};
      if (kind == "experiment") {
        Experiment e;
        e.owner = key.first;
        e.name = key.second;
        e.env_name = r.at("env_name").get<std::string>();
        e.created_at = from_unix_ms(r.at("created_at_ms").get<std::int64_t>());
        experiments_.emplace(key, std::move(e));
      } else if (kind == "episode") {
        const auto it = experiments_.find(key);
        if (it == experiments_.end()) {
          throw Error(ErrorCode::StorageFailure, file_.path().string() + ": episode for unknown experiment");
        }
        EpisodeRecord ep{r.at("episode_index").get<std::uint64_t>(), r.at("total_reward").get<double>(),
                         r.at("steps").get<int>(), from_unix_ms(r.at("ended_at_ms").get<std::int64_t>())};
        if (ep.episode_index != it->second.episodes.size()) {
          throw Error(ErrorCode::StorageFailure, file_.path().string() + ": episode index out of sequence");
        }
        it->second.episodes.push_back(ep);
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::StorageFailure, file_.path().string() + ": malformed experiment record: " + e.what());
    }
  }
}

Experiment ExperimentStore::register_experiment(const std::string& owner, const std::string& name, bool resume,
                                                const std::string& env_name, TimePoint now) {
  if (name.empty() || name.size() > 256) throw Error(ErrorCode::BadRequest, "experiment name must be 1..256 characters");
  std::lock_guard lock(mutex_);
  Experiment result;
  file_.locked([&] {
    refresh_locked();
    const auto it = experiments_.find({owner, name});
    if (resume) {
      if (it == experiments_.end()) throw Error(ErrorCode::NotFound, "no experiment named '" + name + "' to resume");
      if (it->second.env_name != env_name) {
        throw Error(ErrorCode::BadRequest,
                    "experiment '" + name + "' belongs to " + it->second.env_name + ", not " + env_name);
      }
      result = it->second;
      return;
    }
    if (it != experiments_.end()) throw Error(ErrorCode::NameTaken, "experiment '" + name + "' already exists");
    file_.append({{"kind", "experiment"},
                  {"owner", owner},
                  {"name", name},
                  {"env_name", env_name},
                  {"created_at_ms", to_unix_ms(now)}});
    refresh_locked();
    result = experiments_.at({owner, name});
  });
  return result;
}

Experiment ExperimentStore::record_episode(const std::string& owner, const std::string& name, double total_reward,
                                           int steps, TimePoint now) {
  std::lock_guard lock(mutex_);
  Experiment result;
  file_.locked([&] {
    refresh_locked();
    const auto it = experiments_.find({owner, name});
    if (it == experiments_.end()) throw Error(ErrorCode::NotFound, "no experiment named '" + name + "'");
    file_.append({{"kind", "episode"},
                  {"owner", owner},
                  {"name", name},
                  {"episode_index", it->second.episodes.size()},
                  {"total_reward", total_reward},
                  {"steps", steps},
                  {"ended_at_ms", to_unix_ms(now)}});
    refresh_locked();
    result = it->second;
  });
  return result;
}

std::optional<Experiment> ExperimentStore::find(const std::string& owner, const std::string& name) {
  std::lock_guard lock(mutex_);
  refresh_locked();
  const auto it = experiments_.find({owner, name});
  if (it == experiments_.end()) return std::nullopt;
  return it->second;
}

std::vector<Experiment> ExperimentStore::all() {
  std::lock_guard lock(mutex_);
  refresh_locked();
  std::vector<Experiment> out;
  for (const auto& [key, e] : experiments_) out.push_back(e);
  return out;
}

}  // namespace gymgate::gateway
