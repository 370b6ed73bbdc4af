// gymctl: talk to a gateway from the command line.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gymgate/client/run_agent.hpp"
#include "gymgate/client/session.hpp"
#include "gymgate/exit_codes.hpp"

using namespace gymgate;
using namespace gymgate::client;

namespace {

struct Common {
  std::string addr = "127.0.0.1:7007";
  std::string token;
  int connect_timeout_ms = 5000;
};

ClientSession connect(const Common& c) {
  if (c.token.empty()) throw Error(ErrorCode::BadRequest, "no token: pass --token or set GYMGATE_TOKEN");
  SessionOptions options;
  options.connect_timeout = std::chrono::milliseconds(c.connect_timeout_ms);
  return ClientSession(net::parse_address(c.addr), c.token, options);
}

sim::ChannelConfig parse_channels(const std::string& name) {
  if (name == "depth") return sim::ChannelConfig::DepthOnly;
  if (name == "rgb") return sim::ChannelConfig::RgbOnly;
  return sim::ChannelConfig::Rgbd;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gymctl: client for a gymgate server"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--addr", common.addr, "Server host:port")->envname("GYMGATE_ADDR");
  app.add_option("--token", common.token, "Access token")->envname("GYMGATE_TOKEN");
  app.add_option("--connect-timeout-ms", common.connect_timeout_ms, "TCP connect timeout")
      ->check(CLI::Range(1, 600000));

  auto* connect_test = app.add_subcommand("connect-test", "Connect, authenticate and send one heartbeat");

  auto* run = app.add_subcommand("run", "Run a scripted agent and write a per-episode CSV summary");
  std::string env_name, experiment, channels = "depth", policy_name = "random", out, servo_config;
  bool resume = false;
  int episodes = 1;
  std::uint64_t policy_seed = 0;
  std::optional<std::uint64_t> world_seed;
  run->add_option("--env", env_name, "Environment name")->required();
  run->add_option("--experiment", experiment, "Experiment name")->required();
  run->add_flag("--resume", resume, "Append to an existing experiment");
  run->add_option("--channels", channels, "depth, rgb or rgbd")->check(CLI::IsMember({"depth", "rgb", "rgbd"}));
  run->add_option("--policy", policy_name, "random, servo, or oracle (needs a debug-pose server)")
      ->check(CLI::IsMember({"random", "servo", "oracle"}));
  run->add_option("--episodes", episodes, "Episode count")->check(CLI::NonNegativeNumber);
  run->add_option("--out", out, "CSV path; stdout when omitted");
  run->add_option("--seed", policy_seed, "Random policy seed");
  run->add_option("--world-seed", world_seed, "Fix the server-side world seed");
  run->add_option("--servo-config", servo_config, "Servo thresholds (JSON)")->check(CLI::ExistingFile);

  auto* dump = app.add_subcommand("dump", "Reset an environment and write its first observation");
  std::string dump_env = "MonolithDiscreteSim-v0", dump_experiment = "gymctl-dump", dump_channels = "rgbd", dump_out;
  dump->add_option("--env", dump_env, "Environment name");
  dump->add_option("--experiment", dump_experiment, "Experiment to attach to (created if missing)");
  dump->add_option("--channels", dump_channels, "depth, rgb or rgbd")->check(CLI::IsMember({"depth", "rgb", "rgbd"}));
  dump->add_option("--out", dump_out, "Output directory")->required();

  auto* board = app.add_subcommand("leaderboard", "Show the leaderboard");
  std::uint32_t top = 10;
  board->add_option("--top", top, "Number of entries")->check(CLI::Range(1, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (connect_test->parsed()) {
      ClientSession s = connect(common);
      s.heartbeat();
      std::cout << "connected: session " << s.session_id() << ", server " << s.server_version() << '\n';
      return kExitOk;
    }
    if (run->parsed()) {
      const PolicyKind kind = *policy_kind_from_string(policy_name);
      const ServoParams servo = servo_config.empty() ? ServoParams{} : load_servo_params(servo_config);
      std::ofstream file;
      std::ostream* csv = &std::cout;
      if (!out.empty()) {
        file.open(out);
        if (!file) throw Error(ErrorCode::IoFailure, "cannot write " + out);
        csv = &file;
      }
      ClientSession s = connect(common);
      protocol::Make m;
      m.env_name = env_name;
      m.experiment_name = experiment;
      m.resume_experiment = resume;
      m.channel_type = parse_channels(channels);
      m.seed = world_seed;
      RemoteEnv env(s, m);
      auto policy = make_policy(kind, env, policy_seed, servo);
      const RunSummary summary = run_agent(env, *policy, episodes, csv);
      std::fprintf(stderr, "episodes: %zu, success rate: %.3f\n", summary.episodes.size(), summary.success_rate());
      return kExitOk;
    }
    if (dump->parsed()) {
      ClientSession s = connect(common);
      protocol::Make m;
      m.env_name = dump_env;
      m.experiment_name = dump_experiment;
      m.channel_type = parse_channels(dump_channels);
      m.resume_experiment = true;
      std::optional<RemoteEnv> env;
      try {
        env.emplace(s, m);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotFound) throw;
        m.resume_experiment = false;
        env.emplace(s, m);
      }
      for (const auto& path : dump_observation(env->reset().observation, dump_out)) std::cout << path.string() << '\n';
      return kExitOk;
    }
    if (board->parsed()) {
      ClientSession s = connect(common);
      std::cout << "rank\texperiment\towner\tenv\tepisodes\tbest_window_avg\n";
      int rank = 1;
      for (const auto& e : s.leaderboard(top)) {
        std::cout << rank++ << '\t' << e.experiment_name << '\t' << e.owner << '\t' << e.env_name << '\t'
                  << e.episodes_count << '\t' << e.best_window_avg << '\n';
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "gymctl: " << to_string(e.code()) << ": " << e.detail() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "gymctl: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
