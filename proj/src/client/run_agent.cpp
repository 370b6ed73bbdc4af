#include "gymgate/client/run_agent.hpp"

#include "gymgate/error.hpp"
#include "gymgate/sim/image_io.hpp"

namespace gymgate::client {

double RunSummary::success_rate() const {
  if (episodes.empty()) return 0.0;
  std::size_t wins = 0;
  for (const auto& e : episodes) wins += e.termination == sim::Termination::Success;
  return static_cast<double>(wins) / static_cast<double>(episodes.size());
}

RunSummary run_agent(EnvEndpoint& env, Policy& policy, int episodes, std::ostream* csv) {
  if (episodes < 0) throw Error(ErrorCode::BadRequest, "episode count must not be negative");
  RunSummary summary;
  if (csv) *csv << kSummaryCsvHeader << '\n' << std::flush;
  for (int ep = 0; ep < episodes; ++ep) {
    policy.begin_episode();
    Transition t = env.reset();
    EpisodeSummary row;
    row.episode_index = ep;
    while (!t.done) {
      t = env.step(policy.act(t));
      row.reward += t.reward;
    }
    row.steps = t.step_index;
    row.termination = t.termination;
    summary.episodes.push_back(row);
    if (csv) {
      *csv << row.episode_index << ',' << row.reward << ',' << row.steps << ',' << sim::to_string(row.termination)
           << '\n'
           << std::flush;
    }
  }
  return summary;
}

std::vector<std::filesystem::path> dump_observation(const sim::Observation& obs, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  if (sim::has_depth(obs.channels)) {
    written.push_back(dir / "depth.pgm");
    sim::write_depth_pgm(written.back(), obs.width, obs.height, obs.depth);
  }
  if (sim::has_rgb(obs.channels)) {
    written.push_back(dir / "rgb.ppm");
    sim::write_rgb_ppm(written.back(), obs.width, obs.height, obs.rgb);
  }
  return written;
}

}  // namespace gymgate::client
