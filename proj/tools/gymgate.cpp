// gymgate: run the gateway and administer its data directory.

#include <csignal>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "gymgate/exit_codes.hpp"
#include "gymgate/gateway/env_registry.hpp"
#include "gymgate/gateway/server.hpp"

using namespace gymgate;
using namespace gymgate::gateway;

namespace {

int serve(const std::string& config_path, const std::string& data_dir, bool paced, int port, bool debug_pose,
          const std::string& log_level) {
  ServerConfig config;
  if (!config_path.empty()) config = load_server_config(config_path);
  if (!data_dir.empty()) config.data_dir = data_dir;
  if (paced) config.paced = true;
  if (port >= 0) config.port = static_cast<std::uint16_t>(port);
  if (debug_pose) config.debug_pose = true;
  spdlog::set_level(spdlog::level::from_str(log_level));
  if (config.debug_pose) spdlog::warn("debug pose enabled: observations carry ground-truth state");

  // Block the stop signals before any thread starts so only sigwait sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  Server server(config);
  server.start();
  std::printf("listening on %s:%u\n", config.host.c_str(), static_cast<unsigned>(server.port()));
  std::fflush(stdout);
  int sig = 0;
  sigwait(&stop_signals, &sig);
  spdlog::info("signal {}, shutting down", sig);
  server.stop();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gymgate: remote environment gateway"};
  app.require_subcommand(1);
  std::string data_dir = "gymgate-data";
  app.add_option("--data-dir", data_dir, "Directory holding users, bookings, experiments and the leaderboard")
      ->envname("GYMGATE_DATA_DIR");

  auto* serve_cmd = app.add_subcommand("serve", "Run the gateway until SIGINT or SIGTERM");
  std::string config_path;
  bool paced = false;
  bool debug_pose = false;
  int port = -1;
  std::string log_level = "info";
  serve_cmd->add_option("--config", config_path, "Server config (JSON)")->check(CLI::ExistingFile);
  serve_cmd->add_flag("--paced", paced, "Pace every environment, not only the Real names");
  serve_cmd->add_option("--port", port, "Listen port (0 picks a free one)")
      ->envname("GYMGATE_PORT")
      ->check(CLI::Range(0, 65535));
  serve_cmd->add_flag("--debug-pose", debug_pose, "Attach ground-truth pose to observations (testing only)");
  serve_cmd->add_option("--log-level", log_level, "trace, debug, info, warn, error")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  auto* user_cmd = app.add_subcommand("user", "Manage users");
  user_cmd->require_subcommand(1);
  auto* user_add = user_cmd->add_subcommand("add", "Create a user and print their token");
  std::string user_name;
  user_add->add_option("--name", user_name, "User name")->required();
  auto* user_list = user_cmd->add_subcommand("list", "List user names");

  auto* booking_cmd = app.add_subcommand("booking", "Manage time bookings");
  booking_cmd->require_subcommand(1);
  auto* booking_add = booking_cmd->add_subcommand("add", "Book an environment for a user");
  std::string b_user, b_env, b_start, b_end;
  booking_add->add_option("--user", b_user, "User name")->required();
  booking_add->add_option("--env", b_env, "Environment name")->required();
  booking_add->add_option("--start", b_start, "ISO-8601 UTC, epoch seconds, or now[+-N{s,m,h,d}]")->required();
  booking_add->add_option("--end", b_end, "Same formats as --start")->required();
  auto* booking_list = booking_cmd->add_subcommand("list", "List bookings");

  auto* board_cmd = app.add_subcommand("leaderboard", "Inspect the leaderboard");
  board_cmd->require_subcommand(1);
  auto* board_show = board_cmd->add_subcommand("show", "Print the top entries");
  std::size_t top = 10;
  board_show->add_option("--top", top, "Number of entries")->check(CLI::Range(1, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    const std::filesystem::path dir = data_dir;
    if (serve_cmd->parsed()) {
      return serve(config_path, app.count("--data-dir") ? data_dir : "", paced, port, debug_pose, log_level);
    }
    if (user_add->parsed()) {
      UserStore users(dir / "users.jsonl");
      std::cout << users.add(user_name).token << '\n';
      return kExitOk;
    }
    if (user_list->parsed()) {
      UserStore users(dir / "users.jsonl");
      for (const auto& u : users.all()) std::cout << u.id << '\t' << format_utc(u.created_at) << '\n';
      return kExitOk;
    }
    if (booking_add->parsed()) {
      UserStore users(dir / "users.jsonl");
      if (!users.by_name(b_user)) throw Error(ErrorCode::NotFound, "no user named '" + b_user + "'");
      const EnvSpec& spec = resolve_env(b_env);
      const TimePoint now = Clock::now();
      BookingStore bookings(dir / "bookings.jsonl");
      const Booking b = bookings.add(b_user, spec.name, parse_time(b_start, now), parse_time(b_end, now));
      std::cout << "booking " << b.booking_id << ": " << b.user_id << " on " << b.env_id << " from "
                << format_utc(b.start) << " to " << format_utc(b.end) << '\n';
      return kExitOk;
    }
    if (booking_list->parsed()) {
      BookingStore bookings(dir / "bookings.jsonl");
      for (const auto& b : bookings.all()) {
        std::cout << b.booking_id << '\t' << b.user_id << '\t' << b.env_id << '\t' << format_utc(b.start) << '\t'
                  << format_utc(b.end) << '\n';
      }
      return kExitOk;
    }
    if (board_show->parsed()) {
      Leaderboard board(dir / "leaderboard.jsonl");
      std::cout << "rank\texperiment\towner\tenv\tepisodes\tbest_window_avg\tlast_updated\n";
      int rank = 1;
      for (const auto& e : board.top(top)) {
        std::cout << rank++ << '\t' << e.experiment_name << '\t' << e.owner << '\t' << e.env_name << '\t'
                  << e.episodes_count << '\t' << e.best_window_avg << '\t'
                  << format_utc(from_unix_ms(e.last_updated_ms)) << '\n';
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "gymgate: " << to_string(e.code()) << ": " << e.detail() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "gymgate: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
