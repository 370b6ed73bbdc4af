#include "gymgate/gateway/server.hpp"

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <list>
#include <mutex>
#include <random>
#include <thread>

#include <spdlog/spdlog.h>

#include "gymgate/error.hpp"
#include "gymgate/gateway/env_registry.hpp"
#include "gymgate/gateway/handshake.hpp"
#include "gymgate/net/socket.hpp"
#include "gymgate/sim/config_io.hpp"
#include "gymgate/sim/world.hpp"

namespace gymgate::gateway {

namespace fs = std::filesystem;
using json = nlohmann::json;

// --- configuration ----------------------------------------------------------

ServerConfig server_config_from_json(const json& j, const fs::path& base_dir, ServerConfig c) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!j.is_object()) bad("server config must be a JSON object");
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base_dir / p; };
  auto millis = [&](const json& v, const std::string& key) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) bad(key + " must be a non-negative integer");
    return std::chrono::milliseconds(v.get<std::int64_t>());
  };
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "host") {
        c.host = v.get<std::string>();
      } else if (key == "port") {
        const auto port = v.get<std::int64_t>();
        if (port < 0 || port > 65535) bad("port out of range");
        c.port = static_cast<std::uint16_t>(port);
      } else if (key == "data_dir") {
        c.data_dir = resolve(v.get<std::string>());
      } else if (key == "lease_ttl_ms") {
        c.lease_ttl = millis(v, key);
      } else if (key == "sweep_interval_ms") {
        c.sweep_interval = millis(v, key);
      } else if (key == "paced") {
        c.paced = v.get<bool>();
      } else if (key == "pacing_extra_max_ms") {
        c.pacing_extra_max = millis(v, key);
      } else if (key == "base_seed") {
        if (v.is_null()) {
          c.base_seed.reset();
        } else {
          c.base_seed = v.get<std::uint64_t>();
        }
      } else if (key == "debug_pose") {
        c.debug_pose = v.get<bool>();
      } else if (key == "world_configs") {
        for (const auto& [name, path] : v.items()) c.world_configs[name] = resolve(path.get<std::string>());
      } else {
        bad("unknown server config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    bad(std::string("server config: ") + e.what());
  }
  if (c.lease_ttl.count() <= 0) bad("lease_ttl_ms must be positive");
  if (c.sweep_interval.count() <= 0) bad("sweep_interval_ms must be positive");
  return c;
}

ServerConfig load_server_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open " + path.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::InvalidConfig, path.string() + " is not valid JSON");
  return server_config_from_json(j, path.parent_path());
}

// --- server state -----------------------------------------------------------

namespace {

struct EnvSlot {
  EnvSpec spec;
  sim::WorldConfig world_config;
  bool paced = false;

  std::mutex mutex;
  std::uint64_t lease_id = 0;  // lease the current world belongs to
  std::unique_ptr<sim::World> world;
  std::string owner;
  std::string experiment;
  double episode_reward = 0.0;
  std::mt19937_64 pacing_rng;

  void clear() {
    lease_id = 0;
    world.reset();
    owner.clear();
    experiment.clear();
    episode_reward = 0.0;
  }
};

struct Binding {
  std::string env;
  std::uint64_t lease_id = 0;
};

struct Session {
  std::uint64_t id = 0;
  std::string wire_id;
  std::optional<std::string> user;
  std::map<std::uint32_t, Binding> handles;
};

struct Connection {
  net::Socket socket;
  std::thread thread;
  std::atomic<bool> finished{false};
};

}  // namespace

struct Server::Impl {
  explicit Impl(ServerConfig c)
      : config(std::move(c)),
        users(config.data_dir / "users.jsonl"),
        bookings(config.data_dir / "bookings.jsonl"),
        experiments(config.data_dir / "experiments.jsonl"),
        leaderboard(config.data_dir / "leaderboard.jsonl"),
        leases(
            [this](const std::string& user, const std::string& env, TimePoint now) -> std::optional<std::uint64_t> {
              if (const auto b = bookings.covering(user, env, now)) return b->booking_id;
              return std::nullopt;
            },
            config.lease_ttl),
        seed_rng(config.base_seed ? *config.base_seed : std::random_device{}()) {
    for (const auto& spec : env_specs()) {
      auto slot = std::make_unique<EnvSlot>();
      slot->spec = spec;
      slot->world_config = default_world_config(spec);
      for (const auto& key : {spec.family, spec.name}) {
        const auto it = config.world_configs.find(key);
        if (it != config.world_configs.end()) slot->world_config = sim::load_world_config(it->second, slot->world_config);
      }
      if (slot->world_config.action_space != spec.action_space) {
        throw Error(ErrorCode::InvalidConfig, "world config for " + spec.name + " has the wrong action space");
      }
      sim::validate(slot->world_config);
      slot->paced = spec.real || config.paced;
      slots.emplace(spec.name, std::move(slot));
    }
    for (const auto& [key, path] : config.world_configs) {
      bool known = false;
      for (const auto& spec : env_specs()) known = known || key == spec.family || key == spec.name;
      if (!known) throw Error(ErrorCode::InvalidConfig, "world_configs names unknown environment '" + key + "'");
    }
    const std::size_t repaired = leaderboard.reconcile(experiments.all());
    if (repaired > 0) spdlog::warn("rebuilt {} leaderboard entries from experiment logs", repaired);
  }

  ServerConfig config;
  UserStore users;
  BookingStore bookings;
  ExperimentStore experiments;
  Leaderboard leaderboard;
  LeaseTable leases;
  std::map<std::string, std::unique_ptr<EnvSlot>> slots;

  std::mutex seed_mutex;
  std::mt19937_64 seed_rng;
  std::atomic<std::uint64_t> next_session{1};
  std::atomic<std::uint32_t> next_handle{1};

  std::unique_ptr<net::Listener> listener;
  std::thread accept_thread;
  std::thread sweeper_thread;
  std::mutex stop_mutex;
  std::condition_variable stop_cv;
  bool stopping = false;
  bool started = false;

  std::mutex connections_mutex;
  std::list<std::unique_ptr<Connection>> connections;

  std::uint64_t fresh_seed() {
    std::lock_guard lock(seed_mutex);
    return seed_rng();
  }

  std::vector<Lease> sweep(TimePoint now) {
    auto expired = leases.expire(now);
    for (const auto& lease : expired) {
      spdlog::info("lease {} on {} held by {} expired", lease.lease_id, lease.env_id, lease.user_id);
      release_slot(lease);
    }
    return expired;
  }

  void release_slot(const Lease& lease) {
    EnvSlot& slot = *slots.at(lease.env_id);
    std::lock_guard lock(slot.mutex);
    // Abandon the episode and drop the world so the next holder starts clean.
    if (slot.lease_id == lease.lease_id) slot.clear();
  }

  // --- request handling -----------------------------------------------------

  EnvSlot& checked_slot(Session& s, std::uint32_t handle, Binding& binding_out) {
    const auto it = s.handles.find(handle);
    if (it == s.handles.end()) throw Error(ErrorCode::BadRequest, "unknown env handle " + std::to_string(handle));
    binding_out = it->second;
    return *slots.at(binding_out.env);
  }

  void check_lease(const EnvSlot& slot, const Binding& b, TimePoint now) {
    if (slot.lease_id != b.lease_id || !slot.world || !leases.is_live(b.env, b.lease_id, now)) {
      throw Error(ErrorCode::LeaseLost, "lease on " + b.env + " is no longer held by this session");
    }
  }

  std::optional<protocol::DebugState> debug_state(const EnvSlot& slot) const {
    if (!config.debug_pose) return std::nullopt;
    const auto& p = slot.world->pose();
    const auto& m = slot.world_config.monolith.center;
    return protocol::DebugState{p.x, p.y, p.theta, m.x(), m.y()};
  }

  protocol::Message make(Session& s, const protocol::Make& m) {
    const EnvSpec& spec = resolve_env(m.env_name);
    const TimePoint now = Clock::now();
    const AcquireResult acquired = leases.acquire(*s.user, spec.name, s.id, now);
    if (acquired.reclaimed) {
      spdlog::info("reclaimed stale lease {} on {} from {}", acquired.reclaimed->lease_id, spec.name,
                   acquired.reclaimed->user_id);
      release_slot(*acquired.reclaimed);
    }
    try {
      experiments.register_experiment(*s.user, m.experiment_name, m.resume_experiment, spec.name, now);
    } catch (...) {
      if (!acquired.renewed) leases.release(spec.name, acquired.lease.lease_id);
      throw;
    }

    EnvSlot& slot = *slots.at(spec.name);
    const std::uint64_t seed = m.seed ? *m.seed : fresh_seed();
    {
      std::lock_guard lock(slot.mutex);
      slot.clear();
      slot.world = std::make_unique<sim::World>(slot.world_config, seed, m.channel_type);
      slot.lease_id = acquired.lease.lease_id;
      slot.owner = *s.user;
      slot.experiment = m.experiment_name;
      slot.pacing_rng.seed(seed ^ 0x9e3779b97f4a7c15ULL);
    }
    // A re-make replaces the world, so older handles on this env go stale.
    std::erase_if(s.handles, [&](const auto& kv) { return kv.second.env == spec.name; });
    const std::uint32_t handle = next_handle++;
    s.handles[handle] = Binding{spec.name, acquired.lease.lease_id};
    spdlog::info("session {} ({}) made {} as handle {}, experiment '{}'", s.wire_id, *s.user, spec.name, handle,
                 m.experiment_name);

    const auto& cam = slot.world_config.camera;
    protocol::MakeOk ok;
    ok.env_handle = handle;
    ok.obs_shape = {cam.height_px, cam.width, sim::channel_count(m.channel_type)};
    ok.action_space = spec.action_space;
    if (spec.action_space == sim::ActionSpace::Continuous) {
      ok.action_bounds = std::array<double, 2>{slot.world_config.action_params.continuous_linear_bound,
                                               slot.world_config.action_params.continuous_angular_bound};
    }
    return ok;
  }

  protocol::Message reset(Session& s, const protocol::Reset& m) {
    Binding b;
    EnvSlot& slot = checked_slot(s, m.env_handle, b);
    std::lock_guard lock(slot.mutex);
    check_lease(slot, b, Clock::now());
    protocol::ResetOk ok;
    ok.observation = slot.world->reset();
    slot.episode_reward = 0.0;
    ok.debug = debug_state(slot);
    return ok;
  }

  protocol::Message step(Session& s, const protocol::Step& m, std::chrono::steady_clock::time_point received) {
    Binding b;
    EnvSlot& slot = checked_slot(s, m.env_handle, b);
    std::lock_guard lock(slot.mutex);
    check_lease(slot, b, Clock::now());
    sim::StepResult result = slot.world->step(m.action);
    slot.episode_reward += result.reward;
    if (result.done) {
      try {
        const Experiment e = experiments.record_episode(slot.owner, slot.experiment, slot.episode_reward,
                                                        result.info.step_index, Clock::now());
        leaderboard.update(e);
      } catch (const Error& e) {
        spdlog::error("recording episode for {}/{} failed: {}", slot.owner, slot.experiment, e.what());
        throw Error(ErrorCode::Internal, "episode could not be recorded");
      }
    }
    if (slot.paced) {
      // Emulated execution time: the step itself plus a random settling delay.
      std::uniform_real_distribution<double> extra(0.0, static_cast<double>(config.pacing_extra_max.count()));
      const auto delay = std::chrono::duration<double>(slot.world_config.action_params.step_duration) +
                         std::chrono::duration<double, std::milli>(extra(slot.pacing_rng));
      std::this_thread::sleep_until(received + std::chrono::duration_cast<std::chrono::steady_clock::duration>(delay));
    }
    protocol::StepOk ok;
    ok.observation = std::move(result.observation);
    ok.reward = result.reward;
    ok.done = result.done;
    ok.termination = result.info.termination;
    ok.step_index = result.info.step_index;
    ok.debug = debug_state(slot);
    return ok;
  }

  protocol::Message close(Session& s, const protocol::Close& m) {
    Binding b;
    EnvSlot& slot = checked_slot(s, m.env_handle, b);
    if (leases.release(b.env, b.lease_id)) {
      std::lock_guard lock(slot.mutex);
      if (slot.lease_id == b.lease_id) slot.clear();
    }
    s.handles.erase(m.env_handle);
    return protocol::CloseOk{};
  }

  protocol::Message handle(Session& s, const protocol::Message& request, std::chrono::steady_clock::time_point received) {
    if (const auto* hello = std::get_if<protocol::Hello>(&request)) {
      if (s.user) throw Error(ErrorCode::BadRequest, "session already authenticated");
      auto result = handshake(*hello, users, bookings, Clock::now(), s.wire_id);
      s.user = result.user_id;
      return result.reply;
    }
    if (!s.user) throw Error(ErrorCode::AuthFailed, "hello required before other requests");
    leases.touch(s.id, Clock::now());
    return std::visit(
        [&](const auto& m) -> protocol::Message {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, protocol::Make>) {
            return make(s, m);
          } else if constexpr (std::is_same_v<T, protocol::Reset>) {
            return reset(s, m);
          } else if constexpr (std::is_same_v<T, protocol::Step>) {
            return step(s, m, received);
          } else if constexpr (std::is_same_v<T, protocol::Close>) {
            return close(s, m);
          } else if constexpr (std::is_same_v<T, protocol::Heartbeat>) {
            return protocol::Heartbeat{};
          } else if constexpr (std::is_same_v<T, protocol::LeaderboardQuery>) {
            return protocol::LeaderboardOk{leaderboard.top(m.top_n)};
          } else {
            throw Error(ErrorCode::BadRequest, "'" + std::string(protocol::type_name(m)) + "' is not a request");
          }
        },
        request);
  }

  void serve_connection(Connection& conn) {
    Session s;
    s.id = next_session++;
    {
      std::mt19937_64 r(std::random_device{}());
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%llu-%08llx", static_cast<unsigned long long>(s.id),
                    static_cast<unsigned long long>(r() & 0xffffffffULL));
      s.wire_id = buf;
    }
    spdlog::debug("session {} connected", s.wire_id);
    net::Socket& sock = conn.socket;
    try {
      while (true) {
        protocol::Envelope request;
        try {
          request = net::read_envelope(sock);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::ConnectionClosed) {
            spdlog::warn("session {}: {}; closing", s.wire_id, e.what());
            try {
              net::write_envelope(sock, {0, protocol::ErrorReply{e.code(), e.detail()}});
            } catch (const Error&) {
            }
          }
          break;
        }
        const auto received = std::chrono::steady_clock::now();
        if (sock.has_pending_data()) {
          net::write_envelope(sock, {request.id, protocol::ErrorReply{ErrorCode::PipeliningUnsupported,
                                                                      "one request at a time per connection"}});
          spdlog::warn("session {} pipelined requests; closing", s.wire_id);
          break;
        }
        protocol::Message reply;
        bool close_after = false;
        try {
          reply = handle(s, request.message, received);
          if (std::holds_alternative<protocol::Hello>(request.message) &&
              std::holds_alternative<protocol::ErrorReply>(reply)) {
            close_after = true;
          }
        } catch (const Error& e) {
          reply = protocol::ErrorReply{e.code(), e.detail()};
        } catch (const std::exception& e) {
          spdlog::error("session {}: internal error: {}", s.wire_id, e.what());
          reply = protocol::ErrorReply{ErrorCode::Internal, "internal server error"};
        }
        net::write_envelope(sock, {request.id, std::move(reply)});
        if (close_after) break;
      }
    } catch (const Error& e) {
      spdlog::debug("session {} transport error: {}", s.wire_id, e.what());
    }
    for (const auto& lease : leases.release_session(s.id)) {
      spdlog::info("session {} disconnected, released {}", s.wire_id, lease.env_id);
      release_slot(lease);
    }
    sock.shutdown();
    conn.finished = true;
  }

  void reap_finished() {
    std::lock_guard lock(connections_mutex);
    for (auto it = connections.begin(); it != connections.end();) {
      if ((*it)->finished) {
        (*it)->thread.join();
        it = connections.erase(it);
      } else {
        ++it;
      }
    }
  }

  void accept_loop() {
    while (true) {
      net::Socket sock;
      try {
        sock = listener->accept();
      } catch (const Error&) {
        return;
      }
      reap_finished();
      std::lock_guard lock(connections_mutex);
      {
        std::lock_guard stop_lock(stop_mutex);
        if (stopping) return;
      }
      auto conn = std::make_unique<Connection>();
      conn->socket = std::move(sock);
      Connection* raw = conn.get();
      connections.push_back(std::move(conn));
      raw->thread = std::thread([this, raw] { serve_connection(*raw); });
    }
  }

  void sweeper_loop() {
    std::unique_lock lock(stop_mutex);
    while (!stopping) {
      stop_cv.wait_for(lock, config.sweep_interval);
      if (stopping) break;
      lock.unlock();
      try {
        sweep(Clock::now());
      } catch (const std::exception& e) {
        spdlog::error("lease sweep failed: {}", e.what());
      }
      lock.lock();
    }
  }
};

Server::Server(ServerConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Server::~Server() { stop(); }

void Server::start() {
  if (impl_->started) return;
  impl_->listener = std::make_unique<net::Listener>(impl_->config.host, impl_->config.port);
  impl_->started = true;
  impl_->accept_thread = std::thread([this] { impl_->accept_loop(); });
  impl_->sweeper_thread = std::thread([this] { impl_->sweeper_loop(); });
  spdlog::info("gateway listening on {}:{}", impl_->config.host, impl_->listener->port());
}

void Server::stop() {
  if (!impl_ || !impl_->started) return;
  {
    std::lock_guard lock(impl_->stop_mutex);
    if (impl_->stopping) return;
    impl_->stopping = true;
  }
  impl_->stop_cv.notify_all();
  impl_->listener->shutdown();
  if (impl_->accept_thread.joinable()) impl_->accept_thread.join();
  if (impl_->sweeper_thread.joinable()) impl_->sweeper_thread.join();
  std::list<std::unique_ptr<Connection>> connections;
  {
    std::lock_guard lock(impl_->connections_mutex);
    for (auto& c : impl_->connections) c->socket.shutdown();
    connections.swap(impl_->connections);
  }
  for (auto& c : connections) {
    if (c->thread.joinable()) c->thread.join();
  }
}

std::uint16_t Server::port() const { return impl_->listener ? impl_->listener->port() : impl_->config.port; }
const ServerConfig& Server::config() const { return impl_->config; }
std::vector<Lease> Server::sweep(TimePoint now) { return impl_->sweep(now); }
UserStore& Server::users() { return impl_->users; }
BookingStore& Server::bookings() { return impl_->bookings; }
ExperimentStore& Server::experiments() { return impl_->experiments; }
Leaderboard& Server::leaderboard() { return impl_->leaderboard; }
LeaseTable& Server::leases() { return impl_->leases; }

}  // namespace gymgate::gateway
