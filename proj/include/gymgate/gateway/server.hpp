#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gymgate/gateway/bookings.hpp"
#include "gymgate/gateway/experiments.hpp"
#include "gymgate/gateway/leaderboard.hpp"
#include "gymgate/gateway/leases.hpp"
#include "gymgate/gateway/users.hpp"

namespace gymgate::gateway {

struct ServerConfig {
  std::string host = "0.0.0.0";
  std::uint16_t port = 7007;  // 0 picks a free port
  std::filesystem::path data_dir = "gymgate-data";
  std::chrono::milliseconds lease_ttl{60'000};
  std::chrono::milliseconds sweep_interval{5'000};
  bool paced = false;  // pace every env, not only the Real names
  std::chrono::milliseconds pacing_extra_max{1'500};
  std::optional<std::uint64_t> base_seed;  // seeds worlds made without an explicit seed
  bool debug_pose = false;                 // attach ground-truth pose to observations
  // Environment family ("MonolithDiscrete", ...) or full name -> world config file.
  std::map<std::string, std::filesystem::path> world_configs;
};

/// Keys: host, port, data_dir, lease_ttl_ms, sweep_interval_ms, paced,
/// pacing_extra_max_ms, base_seed, debug_pose, world_configs. Relative
/// paths resolve against `base_dir`. Throws InvalidConfig.
ServerConfig server_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {},
                                     ServerConfig base = {});
ServerConfig load_server_config(const std::filesystem::path& path);

/// The gateway: accepts client connections, authenticates them, leases
/// environments, routes commands to simulated worlds and records results.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds the listener and starts the accept and sweeper threads.
  void start();
  /// Closes every connection and joins all threads. Idempotent.
  void stop();

  std::uint16_t port() const;
  const ServerConfig& config() const;

  /// One expiry pass; the sweeper thread calls this periodically.
  std::vector<Lease> sweep(TimePoint now);

  UserStore& users();
  BookingStore& bookings();
  ExperimentStore& experiments();
  Leaderboard& leaderboard();
  LeaseTable& leases();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gymgate::gateway
