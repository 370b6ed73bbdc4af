// Acceptance suite: one PASS/FAIL line per criterion, each checked against
// its tolerance and wall-clock bound. Exit status is the number of failures.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <spdlog/spdlog.h>

#include "gymgate/client/endpoint.hpp"
#include "gymgate/client/policies.hpp"
#include "gymgate/client/run_agent.hpp"
#include "gymgate/client/session.hpp"
#include "gymgate/error.hpp"
#include "gymgate/gateway/bookings.hpp"
#include "gymgate/gateway/env_registry.hpp"
#include "gymgate/gateway/experiments.hpp"
#include "gymgate/gateway/leaderboard.hpp"
#include "gymgate/gateway/leases.hpp"
#include "gymgate/gateway/users.hpp"
#include "gymgate/protocol/codec.hpp"
#include "gymgate/sim/world.hpp"
#include "support/gateway_fixture.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/process.hpp"
#include "support/temp_dir.hpp"

using namespace gymgate;
using namespace std::chrono_literals;
using Seconds = std::chrono::duration<double>;

namespace {

/// Collects failed expectations; only the first few are kept for the report.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_++ < 3) detail_ += (detail_.empty() ? "" : "; ") + what;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : ", ") + s; }
  bool ok() const { return failures_ == 0; }
  std::string report() const {
    if (ok()) return notes_;
    return std::to_string(failures_) + " failure(s): " + detail_ + (notes_.empty() ? "" : " [" + notes_ + "]");
  }

 private:
  int failures_ = 0;
  std::string detail_;
  std::string notes_;
};

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s.precision(precision);
  s << std::fixed << v;
  return s.str();
}

std::vector<sim::WorldConfig> variants() {
  using sim::ActionSpace;
  using sim::WorldConfig;
  return {WorldConfig::open_arena(ActionSpace::Discrete), WorldConfig::open_arena(ActionSpace::Continuous),
          WorldConfig::obstacle_arena(ActionSpace::Discrete), WorldConfig::obstacle_arena(ActionSpace::Continuous)};
}

client::SessionOptions quiet() {
  client::SessionOptions o;
  o.heartbeat_interval = 0ms;
  return o;
}

protocol::Make make_request(const std::string& env, const std::string& experiment, sim::ChannelConfig channels,
                            std::optional<std::uint64_t> seed = std::nullopt, bool resume = false) {
  protocol::Make m;
  m.env_name = env;
  m.experiment_name = experiment;
  m.resume_experiment = resume;
  m.channel_type = channels;
  m.seed = seed;
  return m;
}

std::vector<std::uint8_t> step_frame(const sim::Observation& obs, double reward, bool done, sim::Termination t,
                                     int step_index, const std::optional<protocol::DebugState>& debug = {}) {
  protocol::StepOk m;
  m.observation = obs;
  m.reward = reward;
  m.done = done;
  m.termination = t;
  m.step_index = step_index;
  m.debug = debug;
  return protocol::encode_frame({1, m});
}

// ---------------------------------------------------------------------------

Check reward_geometry() {
  Check c;
  sim::WorldConfig config = sim::WorldConfig::open_arena(sim::ActionSpace::Continuous);
  config.terrain_jitter.enabled = false;
  const struct {
    double distance;
    double reward;
    bool success;
  } cases[] = {{0.39, 1.0, true}, {0.40, 1.0, true}, {0.41, 0.0, false}};
  for (const auto& k : cases) {
    for (int dir = 0; dir < 8; ++dir) {
      const double a = dir * std::numbers::pi / 4.0;
      const sim::Pose2D p{config.monolith.center.x() + k.distance * std::cos(a),
                          config.monolith.center.y() + k.distance * std::sin(a), a + 0.3};
      const auto r = sim::compute_reward(p, config);
      const std::string at = "d=" + fmt(k.distance, 2) + " dir " + std::to_string(dir);
      c.expect(r.reward == k.reward && r.success == k.success, at + ": compute_reward");
      // Same pose through a zero-motion step of a live world.
      sim::World world(config, 1);
      world.reset_to(p);
      const auto s = world.step(sim::ContinuousAction{0.0, 0.0});
      c.expect(s.reward == k.reward, at + ": step reward " + fmt(s.reward, 1));
      c.expect((s.info.termination == sim::Termination::Success) == k.success && s.done == k.success,
               at + ": step termination " + std::string(sim::to_string(s.info.termination)));
    }
  }
  c.note("0.39/0.40/0.41 m -> 1/1/0 over 8 bearings");
  return c;
}

Check episode_bounds() {
  Check c;
  const sim::Pose2D starts[] = {{0.0, 1.0, 0.0}, {0.8, 0.0, 2.0}};
  int episodes = 0;
  for (auto space : {sim::ActionSpace::Discrete, sim::ActionSpace::Continuous}) {
    const sim::Action spin = space == sim::ActionSpace::Discrete ? sim::Action{sim::DiscreteAction::Left}
                                                                 : sim::Action{sim::ContinuousAction{0.0, 1.0}};
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
      sim::World world(sim::WorldConfig::open_arena(space), seed, sim::ChannelConfig::DepthOnly);
      world.reset_to(starts[seed - 1]);
      sim::StepResult r;
      int steps = 0;
      while (world.episode_active()) {
        r = world.step(spin);
        ++steps;
        c.expect(r.reward == 0.0, "nonzero reward at step " + std::to_string(steps));
        if (steps < 100) c.expect(!r.done, "done early at step " + std::to_string(steps));
      }
      c.expect(steps == 100 && r.info.step_index == 100, "ended at step " + std::to_string(steps));
      c.expect(r.info.termination == sim::Termination::StepLimit,
               "termination " + std::string(sim::to_string(r.info.termination)));
      ++episodes;
    }
  }
  c.note(std::to_string(episodes) + " spinning episodes, all StepLimit at 100");
  return c;
}

Check depth_oracle() {
  Check c;
  int worst = 0;
  int frames = 0;
  std::uint64_t seed = 100;
  for (const auto& config : variants()) {
    sim::World world(config, ++seed, sim::ChannelConfig::DepthOnly);
    for (int i = 0; i < 100; ++i) {
      world.reset();
      const sim::Pose2D p = world.pose();
      const auto depth = world.render_depth(p);
      const auto expected = oracle::brute_force_depth(config, p.x, p.y, p.theta);
      c.expect(depth.size() == expected.size(), "frame size");
      if (depth.size() != expected.size()) continue;
      int frame_worst = 0;
      for (std::size_t k = 0; k < depth.size(); ++k) {
        frame_worst = std::max(frame_worst, std::abs(int(depth[k]) - int(expected[k])));
      }
      c.expect(frame_worst <= 1, "pose (" + fmt(p.x) + "," + fmt(p.y) + "," + fmt(p.theta) + ") off by " +
                                     std::to_string(frame_worst) + " mm");
      worst = std::max(worst, frame_worst);
      ++frames;
    }
  }
  c.note(std::to_string(frames) + " frames, worst pixel " + std::to_string(worst) + " mm");
  return c;
}

Check determinism() {
  Check c;
  for (const auto& config : variants()) {
    sim::World a(config, 777, sim::ChannelConfig::Rgbd);
    sim::World b(config, 777, sim::ChannelConfig::Rgbd);
    std::mt19937_64 actions(31);
    std::uniform_int_distribution<int> pick(0, 3);
    std::uniform_real_distribution<double> lin(-config.action_params.continuous_linear_bound,
                                               config.action_params.continuous_linear_bound);
    std::uniform_real_distribution<double> ang(-config.action_params.continuous_angular_bound,
                                               config.action_params.continuous_angular_bound);
    std::vector<std::uint8_t> stream_a, stream_b;
    auto append = [](std::vector<std::uint8_t>& s, const std::vector<std::uint8_t>& f) {
      s.insert(s.end(), f.begin(), f.end());
    };
    int resets = 0;
    for (int i = 0; i < 1000; ++i) {
      if (!a.episode_active() || !b.episode_active()) {
        append(stream_a, step_frame(a.reset(), 0.0, false, sim::Termination::None, 0));
        append(stream_b, step_frame(b.reset(), 0.0, false, sim::Termination::None, 0));
        ++resets;
      }
      sim::Action act = sim::DiscreteAction::Forward;
      if (config.action_space == sim::ActionSpace::Discrete) {
        act = static_cast<sim::DiscreteAction>(pick(actions));
      } else {
        const double v = lin(actions);
        act = sim::ContinuousAction{v, ang(actions)};
      }
      const auto ra = a.step(act);
      const auto rb = b.step(act);
      append(stream_a, step_frame(ra.observation, ra.reward, ra.done, ra.info.termination, ra.info.step_index));
      append(stream_b, step_frame(rb.observation, rb.reward, rb.done, rb.info.termination, rb.info.step_index));
    }
    c.expect(stream_a == stream_b, std::string(sim::to_string(config.action_space)) + " variant streams differ");
    c.note(std::to_string(stream_a.size() >> 20) + " MiB, " + std::to_string(resets) + " resets");
  }
  return c;
}

Check protocol_roundtrip_and_fuzz() {
  Check c;
  gen::MessageGenerator g(20261019);
  for (int i = 0; i < 10000; ++i) {
    const protocol::Envelope e = g.envelope();
    try {
      c.expect(protocol::decode_frame(protocol::encode_frame(e)) == e,
               "message " + std::to_string(i) + " (" + std::string(protocol::type_name(e.message)) + ")");
    } catch (const std::exception& ex) {
      c.expect(false, "message " + std::to_string(i) + " threw " + ex.what());
    }
  }
  const std::set<ErrorCode> protocol_codes{ErrorCode::TruncatedFrame,     ErrorCode::OversizeFrame,
                                           ErrorCode::BadHeader,          ErrorCode::UnknownType,
                                           ErrorCode::VersionMismatch,    ErrorCode::BlobLengthMismatch,
                                           ErrorCode::TrailingBytes};
  std::map<ErrorCode, int> seen;
  int decoded = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto frame = g.fuzz_frame();
    try {
      const protocol::Envelope e = protocol::decode_frame(frame);
      ++decoded;
      protocol::encode_frame(e);
    } catch (const Error& e) {
      c.expect(protocol_codes.count(e.code()) > 0, "untyped error " + std::string(to_string(e.code())));
      ++seen[e.code()];
    } catch (const std::exception& e) {
      c.expect(false, std::string("foreign exception ") + e.what());
    }
  }
  c.note("1e4 round trips, 1e5 fuzz frames: " + std::to_string(decoded) + " decoded, " +
         std::to_string(seen.size()) + " distinct error codes");
  return c;
}

Check lease_exclusivity() {
  using gateway::LeaseTable;
  using gateway::TimePoint;
  Check c;
  constexpr int kUsers = 8;
  constexpr int kEnvs = 4;
  constexpr auto kTtl = 60s;
  std::mt19937_64 rng(4242);
  std::array<std::array<bool, kEnvs>, kUsers> booked{};
  for (auto& row : booked) {
    for (auto& b : row) b = rng() % 5 != 0;
  }
  LeaseTable table(
      [&](const std::string& user, const std::string& env, TimePoint) -> std::optional<std::uint64_t> {
        if (booked[std::stoul(user.substr(1))][std::stoul(env.substr(3))]) return 1;
        return std::nullopt;
      },
      kTtl);
  auto env_name = [](int e) { return "env" + std::to_string(e); };

  // Serial model: env -> (holder session, lease id, deadline).
  struct Held {
    int session;
    std::uint64_t id;
    TimePoint deadline;
  };
  std::map<int, Held> model;
  std::array<std::map<int, std::uint64_t>, kUsers> granted{};
  std::uint64_t next_id = 1;
  TimePoint now = gateway::from_unix_ms(1792400000000);
  std::map<std::string, int> counts;
  for (int op = 0; op < 10000 && c.ok(); ++op) {
    now += std::chrono::seconds(rng() % 8);
    const int u = static_cast<int>(rng() % kUsers);
    const int e = static_cast<int>(rng() % kEnvs);
    const std::string at = "op " + std::to_string(op);
    const bool live = model.count(e) && now <= model[e].deadline;
    switch (rng() % 4) {
      case 0:
      case 1: {
        std::optional<ErrorCode> expected;
        if (!booked[u][e]) {
          expected = ErrorCode::NoBooking;
        } else if (live && model[e].session != u) {
          expected = ErrorCode::Busy;
        }
        try {
          const auto r = table.acquire("u" + std::to_string(u), env_name(e), static_cast<std::uint64_t>(u), now);
          c.expect(!expected, at + ": granted, oracle says " + std::string(expected ? to_string(*expected) : ""));
          if (live) {
            c.expect(r.renewed && r.lease.lease_id == model[e].id, at + ": renewal");
            model[e].deadline = now + kTtl;
            ++counts["renew"];
          } else {
            c.expect(!r.renewed && r.lease.lease_id == next_id, at + ": fresh grant id");
            model[e] = Held{u, next_id++, now + kTtl};
            ++counts["grant"];
          }
          granted[u][e] = r.lease.lease_id;
        } catch (const Error& err) {
          c.expect(expected && err.code() == *expected, at + ": unexpected " + std::string(to_string(err.code())));
          ++counts[err.code() == ErrorCode::Busy ? "Busy" : "NoBooking"];
        }
        break;
      }
      case 2: {
        if (!granted[u].count(e)) break;
        const std::uint64_t id = granted[u][e];
        const bool expected = model.count(e) && model[e].id == id;
        c.expect(table.release(env_name(e), id) == expected, at + ": release");
        if (expected) model.erase(e);
        ++counts["release"];
        break;
      }
      default:
        if (rng() % 2) {
          table.touch(static_cast<std::uint64_t>(u), now);
          for (auto& [env, h] : model) {
            if (h.session == u && now <= h.deadline) h.deadline = now + kTtl;
          }
        } else {
          const auto released = table.expire(now);
          std::size_t expected = std::erase_if(model, [&](const auto& kv) { return now > kv.second.deadline; });
          c.expect(released.size() == expected, at + ": expire count");
          counts["expired"] += static_cast<int>(expected);
        }
    }
    for (int env = 0; env < kEnvs; ++env) {
      const auto h = table.holder(env_name(env), now);
      const bool model_live = model.count(env) && now <= model[env].deadline;
      c.expect(h.has_value() == model_live, at + ": holder of " + env_name(env));
      if (h && model_live) c.expect(h->lease_id == model[env].id, at + ": holder id");
    }
  }
  for (const char* k : {"grant", "Busy", "NoBooking", "expired"}) {
    c.expect(counts[k] > 10, std::string("branch '") + k + "' barely exercised");
  }

  // The same table under real contention: 8 threads, 4 envs.
  LeaseTable shared([](const std::string&, const std::string&, TimePoint) { return std::optional<std::uint64_t>(1); },
                    3600s);
  std::array<std::atomic<int>, kEnvs> holders{};
  std::atomic<int> violations{0}, grants{0};
  std::vector<std::thread> threads;
  for (int u = 0; u < kUsers; ++u) {
    threads.emplace_back([&, u] {
      std::mt19937_64 r(static_cast<std::uint64_t>(u) + 1);
      for (int i = 0; i < 1250; ++i) {
        const int e = static_cast<int>(r() % kEnvs);
        try {
          const auto lease = shared.acquire("u" + std::to_string(u), env_name(e), static_cast<std::uint64_t>(u + 1),
                                            gateway::Clock::now());
          if (holders[static_cast<std::size_t>(e)].fetch_add(1) != 0) ++violations;
          ++grants;
          std::this_thread::yield();
          holders[static_cast<std::size_t>(e)].fetch_sub(1);
          shared.release(env_name(e), lease.lease.lease_id);
        } catch (const Error& err) {
          if (err.code() != ErrorCode::Busy) ++violations;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  c.expect(violations == 0, std::to_string(violations.load()) + " concurrent co-grants");
  c.note("serial: " + std::to_string(counts["grant"]) + " grants, " + std::to_string(counts["Busy"]) + " busy, " +
         std::to_string(counts["NoBooking"]) + " no-booking, " + std::to_string(counts["expired"]) +
         " expired; threaded: " + std::to_string(grants.load()) + " grants, 0 overlaps required");
  return c;
}

/// Records a hash of every transition so two runs can be compared without
/// keeping thousands of frames in memory.
class DigestEnv : public client::EnvEndpoint {
 public:
  explicit DigestEnv(client::EnvEndpoint& inner) : inner_(inner) {}
  sim::ActionSpace action_space() const override { return inner_.action_space(); }
  std::optional<std::array<double, 2>> action_bounds() const override { return inner_.action_bounds(); }
  std::array<int, 3> obs_shape() const override { return inner_.obs_shape(); }
  client::Transition reset() override { return record(inner_.reset()); }
  client::Transition step(const sim::Action& a) override { return record(inner_.step(a)); }
  const std::vector<std::size_t>& digests() const { return digests_; }

 private:
  client::Transition record(client::Transition t) {
    const auto f = step_frame(t.observation, t.reward, t.done, t.termination, t.step_index, t.debug);
    digests_.push_back(std::hash<std::string_view>{}(std::string_view(reinterpret_cast<const char*>(f.data()), f.size())));
    return t;
  }
  client::EnvEndpoint& inner_;
  std::vector<std::size_t> digests_;
};

Check end_to_end() {
  Check c;
  testutil::LocalGateway gw({}, "e2e");
  client::ClientSession s(gw.address(), gw.token, quiet());
  const std::string env = "MonolithDiscreteSim-v0";
  const std::uint64_t world_seed = 4242, policy_seed = 11;

  client::RemoteEnv remote(s, make_request(env, "e2e", sim::ChannelConfig::Rgbd, world_seed));
  DigestEnv remote_log(remote);
  client::RandomPolicy remote_policy(remote.action_space(), remote.action_bounds(), policy_seed);
  const auto via_server = client::run_agent(remote_log, remote_policy, 100);

  client::LocalEnv local(gateway::default_world_config(gateway::resolve_env(env)), world_seed,
                         sim::ChannelConfig::Rgbd);
  DigestEnv local_log(local);
  client::RandomPolicy local_policy(local.action_space(), local.action_bounds(), policy_seed);
  const auto in_process = client::run_agent(local_log, local_policy, 100);

  c.expect(via_server.episodes.size() == 100, "server run finished " + std::to_string(via_server.episodes.size()));
  c.expect(via_server.episodes == in_process.episodes, "episode summaries differ");
  c.expect(remote_log.digests() == local_log.digests(), "transition streams differ");
  const auto stored = gw.server().experiments().find("ada", "e2e");
  c.expect(stored && stored->episodes.size() == 100, "server did not record 100 episodes");
  if (stored && stored->episodes.size() == 100) {
    for (std::size_t i = 0; i < 100; ++i) {
      c.expect(stored->episodes[i].total_reward == via_server.episodes[i].reward &&
                   stored->episodes[i].steps == via_server.episodes[i].steps,
               "stored episode " + std::to_string(i) + " differs from client view");
    }
  }
  c.note("100 episodes, " + std::to_string(remote_log.digests().size()) + " transitions, success rate " +
         fmt(via_server.success_rate(), 2));
  return c;
}

Check pacing() {
  Check c;
  testutil::LocalGateway gw({}, "paced");
  client::ClientSession s(gw.address(), gw.token);
  const auto ok = s.make_env(make_request("MonolithDiscreteReal-v0", "paced", sim::ChannelConfig::DepthOnly));
  s.reset(ok.env_handle);
  double lo = 1e9, hi = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const auto r = s.step(ok.env_handle, i % 2 ? sim::DiscreteAction::Left : sim::DiscreteAction::Right);
    const double dt = Seconds(std::chrono::steady_clock::now() - start).count();
    lo = std::min(lo, dt);
    hi = std::max(hi, dt);
    c.expect(dt >= 2.0 && dt <= 4.0, "step " + std::to_string(i) + " took " + fmt(dt) + " s");
    if (r.done) s.reset(ok.env_handle);
  }
  c.note("20 steps, latency " + fmt(lo) + ".." + fmt(hi) + " s");
  return c;
}

Check feasibility() {
  Check c;
  gateway::ServerConfig config;
  config.debug_pose = true;
  testutil::LocalGateway gw(config, "oracle");
  client::ClientSession s(gw.address(), gw.token, quiet());
  for (const std::string env : {"MonolithDiscreteSim-v0", "MonolithContinuousSim-v0"}) {
    client::RemoteEnv remote(s, make_request(env, "oracle-" + env, sim::ChannelConfig::DepthOnly, 2026));
    auto policy = client::make_policy(client::PolicyKind::Oracle, remote, 0);
    const auto summary = client::run_agent(remote, *policy, 100);
    c.expect(summary.episodes.size() == 100, env + ": ran " + std::to_string(summary.episodes.size()));
    c.expect(summary.success_rate() >= 0.95, env + ": success " + fmt(summary.success_rate(), 2));
    c.note(env + " " + fmt(summary.success_rate(), 2));
  }
  return c;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct StoreSnapshot {
  std::vector<gateway::User> users;
  std::vector<gateway::Booking> bookings;
  std::vector<gateway::Experiment> experiments;
  std::vector<protocol::LeaderboardEntry> leaderboard;

  static StoreSnapshot load(const std::filesystem::path& dir) {
    return {gateway::UserStore(dir / "users.jsonl").all(), gateway::BookingStore(dir / "bookings.jsonl").all(),
            gateway::ExperimentStore(dir / "experiments.jsonl").all(),
            gateway::Leaderboard(dir / "leaderboard.jsonl").top(1000)};
  }
};

Check crash_recovery() {
  Check c;
  constexpr auto kTtl = 3000ms;
  testutil::TempDir root("crash");
  const auto data = root / "data";
  std::filesystem::create_directories(data);
  const std::string token = gateway::UserStore(data / "users.jsonl").add("ada").token;
  {
    gateway::BookingStore bookings(data / "bookings.jsonl");
    const auto now = gateway::Clock::now();
    for (const char* env : {"MonolithDiscreteSim-v0", "MonolithContinuousSim-v0"}) {
      bookings.add("ada", env, now - 1h, now + 24h);
    }
  }
  const auto config = root / "server.json";
  std::ofstream(config) << R"({"lease_ttl_ms": )" << kTtl.count() << R"(, "sweep_interval_ms": 200})";
  const std::vector<std::string> serve_args{"--config", config.string()};

  // Phase 1: a client is mid-episode when the gateway is killed.
  std::atomic<int> completed{0};
  std::atomic<bool> client_failed{false};
  {
    testutil::ServeProcess first(GYMGATE_BIN, data, serve_args);
    c.expect(first.port() > 0, "first server did not start");
    if (!c.ok()) return c;
    std::thread runner([&] {
      try {
        client::ClientSession s({"127.0.0.1", static_cast<std::uint16_t>(first.port())}, token, quiet());
        client::RemoteEnv env(s, make_request("MonolithDiscreteSim-v0", "crash", sim::ChannelConfig::DepthOnly, 8));
        client::RandomPolicy policy(env.action_space(), env.action_bounds(), 3);
        for (;;) {
          client::Transition t = env.reset();
          while (!t.done) t = env.step(policy.act(t));
          ++completed;
        }
      } catch (const std::exception&) {
        client_failed = true;
      }
    });
    const auto deadline = std::chrono::steady_clock::now() + 60s;
    while (completed < 120 && !client_failed && std::chrono::steady_clock::now() < deadline) {
      std::this_thread::sleep_for(5ms);
    }
    first.kill(SIGKILL);
    runner.join();
    c.expect(completed >= 120, "client completed only " + std::to_string(completed.load()) + " episodes");
    c.expect(client_failed, "client did not notice the crash");
  }

  const StoreSnapshot before = StoreSnapshot::load(data);
  const std::string users_bytes = read_file(data / "users.jsonl");
  const std::string bookings_bytes = read_file(data / "bookings.jsonl");
  const std::string experiments_bytes = read_file(data / "experiments.jsonl");

  // What the restarted server should report once it repairs any entry torn
  // between the episode write and the leaderboard write.
  const auto expected_dir = root / "expected";
  std::filesystem::copy(data, expected_dir, std::filesystem::copy_options::recursive);
  std::size_t repaired = 0;
  std::vector<protocol::LeaderboardEntry> expected_board;
  {
    gateway::Leaderboard board(expected_dir / "leaderboard.jsonl");
    repaired = board.reconcile(gateway::ExperimentStore(expected_dir / "experiments.jsonl").all());
    expected_board = board.top(1000);
  }
  const auto crashed = std::find_if(before.experiments.begin(), before.experiments.end(),
                                    [](const auto& e) { return e.name == "crash"; });
  c.expect(crashed != before.experiments.end(), "experiment 'crash' was not persisted");
  if (crashed != before.experiments.end()) {
    const auto n = static_cast<int>(crashed->episodes.size());
    c.expect(n == completed || n == completed + 1,
             "persisted " + std::to_string(n) + " episodes, client finished " + std::to_string(completed.load()));
  }
  c.expect(!expected_board.empty(), "no leaderboard entry after 100+ episodes");

  // Phase 2: restart on the same data directory.
  const auto restart_began = std::chrono::steady_clock::now();
  testutil::ServeProcess second(GYMGATE_BIN, data, serve_args);
  c.expect(second.port() > 0, "restarted server did not start");
  if (second.port() <= 0) return c;
  const net::Address addr{"127.0.0.1", static_cast<std::uint16_t>(second.port())};
  client::ClientSession probe(addr, token, quiet());

  // The lease the crashed run held must be grantable again within ttl.
  std::optional<Seconds> reacquired;
  while (!reacquired && std::chrono::steady_clock::now() - restart_began < kTtl + 2s) {
    try {
      probe.make_env(make_request("MonolithDiscreteSim-v0", "crash", sim::ChannelConfig::DepthOnly, std::nullopt, true));
      reacquired = std::chrono::steady_clock::now() - restart_began;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Busy) throw;
      std::this_thread::sleep_for(10ms);
    }
  }
  c.expect(reacquired && *reacquired <= kTtl, "lease from before the crash not reclaimed within ttl");

  c.expect(probe.leaderboard(1000) == expected_board, "served leaderboard differs from the persisted one");
  const StoreSnapshot after = StoreSnapshot::load(data);
  c.expect(after.users == before.users, "users differ after restart");
  c.expect(after.bookings == before.bookings, "bookings differ after restart");
  c.expect(after.experiments == before.experiments, "experiments differ after restart");
  c.expect(read_file(data / "users.jsonl") == users_bytes && read_file(data / "bookings.jsonl") == bookings_bytes &&
               read_file(data / "experiments.jsonl") == experiments_bytes,
           "store files were rewritten on restart");
  if (repaired == 0) c.expect(after.leaderboard == before.leaderboard, "leaderboard differs after restart");

  // Phase 3: a holder that goes silent without disconnecting. Its lease is
  // reclaimed once ttl has passed since its last request.
  const pid_t holder = testutil::spawn({GYMCTL_BIN, "--addr", "127.0.0.1:" + std::to_string(second.port()), "--token",
                                        token, "run", "--env", "MonolithContinuousSim-v0", "--experiment", "holder",
                                        "--episodes", "100000", "--out", "/dev/null"});
  const auto cont = make_request("MonolithContinuousSim-v0", "after-stall", sim::ChannelConfig::DepthOnly);
  // The holder's experiment appears on disk only after its lease is granted.
  bool busy = false;
  for (int i = 0; i < 500 && !busy; ++i) {
    std::this_thread::sleep_for(20ms);
    if (!gateway::ExperimentStore(data / "experiments.jsonl").find("ada", "holder")) continue;
    try {
      probe.make_env(cont);
      break;
    } catch (const Error& e) {
      busy = e.code() == ErrorCode::Busy;
    }
  }
  c.expect(busy, "holder process never held the lease");
  std::optional<Seconds> reclaimed;
  if (busy) {
    ::kill(holder, SIGSTOP);
    const auto stalled = std::chrono::steady_clock::now();
    while (!reclaimed && std::chrono::steady_clock::now() - stalled < kTtl + 3s) {
      try {
        probe.make_env(cont);
        reclaimed = std::chrono::steady_clock::now() - stalled;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Busy) throw;
        std::this_thread::sleep_for(10ms);
      }
    }
    // Slack for one 10 ms poll plus a loopback round trip.
    c.expect(reclaimed && *reclaimed <= kTtl + 50ms,
             "stalled lease reclaimed after " + (reclaimed ? fmt(reclaimed->count()) : std::string("never")) + " s");
  }
  ::kill(holder, SIGKILL);
  ::waitpid(holder, nullptr, 0);

  c.note(std::to_string(completed.load()) + " episodes before SIGKILL, " + std::to_string(repaired) +
         " leaderboard repairs, restart lease after " + (reacquired ? fmt(reacquired->count()) : "-") +
         " s, stalled lease after " + (reclaimed ? fmt(reclaimed->count()) : "-") + " s (ttl " +
         fmt(Seconds(kTtl).count(), 1) + " s)");
  return c;
}

struct Criterion {
  const char* name;
  std::chrono::seconds bound;
  Check (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion criteria[] = {
      {"reward-geometry", 1s, reward_geometry},
      {"episode-bounds", 1s, episode_bounds},
      {"depth-oracle", 120s, depth_oracle},
      {"determinism", 60s, determinism},
      {"protocol-roundtrip-fuzz", 120s, protocol_roundtrip_and_fuzz},
      {"lease-exclusivity", 60s, lease_exclusivity},
      {"end-to-end", 300s, end_to_end},
      {"pacing", 90s, pacing},
      {"feasibility", 300s, feasibility},
      {"crash-recovery", 120s, crash_recovery},
  };
  spdlog::set_level(spdlog::level::warn);
  const std::string only = argc > 1 ? argv[1] : "";
  int failures = 0;
  for (const auto& k : criteria) {
    if (!only.empty() && only != k.name) continue;
    const auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = k.run();
    } catch (const std::exception& e) {
      result.expect(false, std::string("threw: ") + e.what());
    }
    const double elapsed = Seconds(std::chrono::steady_clock::now() - start).count();
    const bool in_time = elapsed <= static_cast<double>(k.bound.count());
    const bool pass = result.ok() && in_time;
    failures += !pass;
    std::printf("[%s] %-24s %7.2f s (bound %3lld s)%s  %s\n", pass ? "PASS" : "FAIL", k.name, elapsed,
                static_cast<long long>(k.bound.count()), in_time ? "" : " OVER TIME", result.report().c_str());
    std::fflush(stdout);
  }
  return failures;
}
