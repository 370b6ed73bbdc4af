#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "gymgate/error.hpp"
#include "gymgate/gateway/bookings.hpp"
#include "gymgate/gateway/experiments.hpp"
#include "gymgate/gateway/jsonl.hpp"
#include "gymgate/gateway/leaderboard.hpp"
#include "gymgate/gateway/time.hpp"
#include "gymgate/gateway/users.hpp"
#include "support/temp_dir.hpp"

using namespace gymgate;
using namespace gymgate::gateway;
using testutil::TempDir;
using namespace std::chrono_literals;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

TimePoint at(const std::string& iso) { return parse_time(iso, TimePoint{}); }

}  // namespace

TEST(Time, ParsesIsoEpochAndRelative) {
  const TimePoint t = at("2026-10-19T10:00:00Z");
  EXPECT_EQ(to_unix_ms(t), 1792404000000);
  EXPECT_EQ(format_utc(t), "2026-10-19T10:00:00Z");
  EXPECT_EQ(parse_time("1792404000", {}), t);
  EXPECT_EQ(parse_time("now", t), t);
  EXPECT_EQ(parse_time("now+90m", t), t + 90min);
  EXPECT_EQ(parse_time("now-2h", t), t - 2h);
  EXPECT_EQ(parse_time("now+30", t), t + 30s);
  EXPECT_EQ(to_unix_ms(at("2026-10-19T10:00:00.250Z")), 1792404000250);
  EXPECT_EQ(code_of([] { parse_time("tomorrow", {}); }), ErrorCode::BadRequest);
  EXPECT_EQ(code_of([] { parse_time("2026-02-30T00:00:00Z", {}); }), ErrorCode::BadRequest);
}

TEST(Jsonl, TornLastLineIsIgnoredAndRepaired) {
  TempDir dir("jsonl");
  const auto path = dir / "log.jsonl";
  {
    JsonlFile f(path);
    f.locked([&] {
      f.append({{"n", 1}});
      f.append({{"n", 2}});
    });
  }
  {
    std::ofstream out(path, std::ios::app);
    out << R"({"n":3,"v":)";  // crash mid-write
  }
  JsonlFile f(path);
  auto records = f.read_new();
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[1]["n"], 2);
  EXPECT_EQ(records[1]["v"], 1);
  f.locked([&] { f.append({{"n", 4}}); });
  records = f.read_new();
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0]["n"], 4);
  JsonlFile replay(path);
  EXPECT_EQ(replay.read_new().size(), 3u);
}

TEST(Jsonl, CorruptCompleteLineIsStorageFailure) {
  TempDir dir("jsonl_bad");
  {
    std::ofstream out(dir / "x.jsonl");
    out << "{\"v\":1}\nnot json\n";
  }
  JsonlFile f(dir / "x.jsonl");
  EXPECT_EQ(code_of([&] { f.read_new(); }), ErrorCode::StorageFailure);
}

TEST(Users, AddLookupAndPersist) {
  TempDir dir("users");
  std::string token;
  {
    UserStore users(dir / "users.jsonl");
    token = users.add("ada").token;
    EXPECT_EQ(token.size(), 32u);
    EXPECT_EQ(token.find_first_not_of("0123456789abcdef"), std::string::npos);
    EXPECT_EQ(code_of([&] { users.add("ada"); }), ErrorCode::NameTaken);
    EXPECT_NE(users.add("grace").token, token);
  }
  UserStore reloaded(dir / "users.jsonl");
  ASSERT_TRUE(reloaded.by_token(token));
  EXPECT_EQ(reloaded.by_token(token)->id, "ada");
  EXPECT_FALSE(reloaded.by_token("0000"));
  EXPECT_EQ(reloaded.all().size(), 2u);
}

TEST(Users, SeesRecordsWrittenByAnotherProcess) {
  TempDir dir("users_shared");
  UserStore server_view(dir / "users.jsonl");
  UserStore operator_view(dir / "users.jsonl");
  const auto u = operator_view.add("linus");
  EXPECT_TRUE(server_view.by_token(u.token));
  EXPECT_EQ(code_of([&] { server_view.add("linus"); }), ErrorCode::NameTaken);
}

TEST(Bookings, IntervalRules) {
  TempDir dir("bookings");
  BookingStore store(dir / "bookings.jsonl");
  const auto b = store.add("ada", "MonolithDiscreteSim-v0", at("2026-10-19T10:00:00Z"), at("2026-10-19T11:00:00Z"));
  EXPECT_EQ(b.booking_id, 1u);
  EXPECT_TRUE(store.covering("ada", "MonolithDiscreteSim-v0", at("2026-10-19T10:30:00Z")));
  EXPECT_FALSE(store.covering("ada", "MonolithDiscreteSim-v0", at("2026-10-19T11:05:00Z")));
  EXPECT_FALSE(store.covering("ada", "MonolithDiscreteSim-v0", at("2026-10-19T11:00:00Z")));  // end exclusive
  EXPECT_FALSE(store.covering("ada", "MonolithContinuousSim-v0", at("2026-10-19T10:30:00Z")));
  EXPECT_FALSE(store.covering("grace", "MonolithDiscreteSim-v0", at("2026-10-19T10:30:00Z")));

  EXPECT_EQ(code_of([&] {
              store.add("grace", "MonolithDiscreteSim-v0", at("2026-10-19T10:59:00Z"), at("2026-10-19T12:00:00Z"));
            }),
            ErrorCode::BookingOverlap);
  EXPECT_EQ(code_of([&] {
              store.add("grace", "MonolithDiscreteSim-v0", at("2026-10-19T12:00:00Z"), at("2026-10-19T12:00:00Z"));
            }),
            ErrorCode::BadRequest);
  // Back-to-back is fine, as is the same slot on another env.
  store.add("grace", "MonolithDiscreteSim-v0", at("2026-10-19T11:00:00Z"), at("2026-10-19T12:00:00Z"));
  store.add("grace", "MonolithContinuousSim-v0", at("2026-10-19T10:00:00Z"), at("2026-10-19T11:00:00Z"));
  EXPECT_TRUE(store.any_covering("grace", at("2026-10-19T10:15:00Z")));
}

TEST(Bookings, RandomMutationsKeepIntervalsDisjoint) {
  TempDir dir("bookings_prop");
  BookingStore store(dir / "bookings.jsonl");
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> env(0, 2), start(0, 500), len(1, 60), user(0, 3);
  int accepted = 0;
  for (int i = 0; i < 400; ++i) {
    const TimePoint s = TimePoint(std::chrono::minutes(start(rng)));
    try {
      store.add("u" + std::to_string(user(rng)), "env" + std::to_string(env(rng)), s, s + std::chrono::minutes(len(rng)));
      ++accepted;
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::BookingOverlap);
    }
  }
  EXPECT_GT(accepted, 20);
  BookingStore reloaded(dir / "bookings.jsonl");
  const auto all = reloaded.all();
  EXPECT_EQ(all.size(), static_cast<std::size_t>(accepted));
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (all[i].env_id == all[j].env_id) {
        EXPECT_FALSE(all[i].overlaps(all[j]));
      }
    }
  }
}

TEST(Experiments, RegisterAndResumeSemantics) {
  TempDir dir("experiments");
  ExperimentStore store(dir / "experiments.jsonl");
  const auto e = store.register_experiment("ada", "My new experiment", false, "MonolithDiscreteSim-v0");
  EXPECT_TRUE(e.episodes.empty());
  EXPECT_EQ(code_of([&] { store.register_experiment("ada", "My new experiment", false, "MonolithDiscreteSim-v0"); }),
            ErrorCode::NameTaken);
  EXPECT_EQ(code_of([&] { store.register_experiment("ada", "missing", true, "MonolithDiscreteSim-v0"); }),
            ErrorCode::NotFound);
  // Names are scoped per owner.
  EXPECT_NO_THROW(store.register_experiment("grace", "My new experiment", false, "MonolithDiscreteSim-v0"));

  store.record_episode("ada", "My new experiment", 1.0, 12);
  const auto resumed = store.register_experiment("ada", "My new experiment", true, "MonolithDiscreteSim-v0");
  ASSERT_EQ(resumed.episodes.size(), 1u);
  const auto next = store.record_episode("ada", "My new experiment", 0.0, 100);
  EXPECT_EQ(next.episodes.back().episode_index, resumed.episodes.back().episode_index + 1);
  EXPECT_EQ(code_of([&] { store.register_experiment("ada", "My new experiment", true, "MonolithContinuousSim-v0"); }),
            ErrorCode::BadRequest);
}

TEST(Experiments, ReloadIsIdentical) {
  TempDir dir("experiments_reload");
  std::vector<Experiment> before;
  {
    ExperimentStore store(dir / "experiments.jsonl");
    store.register_experiment("ada", "a", false, "MonolithDiscreteSim-v0", at("2026-10-19T09:00:00Z"));
    store.register_experiment("ada", "b", false, "MonolithContinuousSim-v0", at("2026-10-19T09:00:01Z"));
    for (int i = 0; i < 30; ++i) store.record_episode("ada", i % 3 ? "a" : "b", i % 4 == 0, i + 1);
    before = store.all();
  }
  ExperimentStore reloaded(dir / "experiments.jsonl");
  EXPECT_EQ(reloaded.all(), before);
}

TEST(BestWindow, MatchesBruteForce) {
  auto brute = [](const std::vector<double>& v, std::size_t w) {
    double best = -1.0;
    for (std::size_t s = 0; s + w <= v.size(); ++s) {
      double sum = 0.0;
      for (std::size_t i = s; i < s + w; ++i) sum += v[i];
      best = std::max(best, sum / static_cast<double>(w));
    }
    return best;
  };
  EXPECT_FALSE(best_window_average(std::vector<double>(99, 1.0)));

  std::vector<double> hundred(100, 0.0);
  for (int i = 0; i < 73; ++i) hundred[static_cast<std::size_t>(i * 100 / 73)] = 1.0;
  EXPECT_DOUBLE_EQ(*best_window_average(hundred), 0.73);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(100 + rng() % 200);
    for (auto& x : v) x = static_cast<double>(rng() % 2);
    EXPECT_DOUBLE_EQ(*best_window_average(v), brute(v, 100));
  }
}

TEST(BestWindow, DocumentedHundredFiftyExample) {
  // First 100 hold 40 successes, last 100 hold 80; built so episodes 50..99
  // contribute 30 to both windows.
  std::vector<double> log(150, 0.0);
  for (int i = 0; i < 10; ++i) log[static_cast<std::size_t>(i)] = 1.0;
  for (int i = 50; i < 80; ++i) log[static_cast<std::size_t>(i)] = 1.0;
  for (int i = 100; i < 150; ++i) log[static_cast<std::size_t>(i)] = 1.0;
  ASSERT_EQ(std::count(log.begin(), log.begin() + 100, 1.0), 40);
  ASSERT_EQ(std::count(log.begin() + 50, log.end(), 1.0), 80);
  double brute = 0.0;
  for (std::size_t s = 0; s <= 50; ++s) {
    brute = std::max(brute, std::count(log.begin() + static_cast<std::ptrdiff_t>(s),
                                       log.begin() + static_cast<std::ptrdiff_t>(s + 100), 1.0) / 100.0);
  }
  EXPECT_DOUBLE_EQ(brute, 0.80);
  EXPECT_DOUBLE_EQ(*best_window_average(log), brute);
}

TEST(Leaderboard, EntryAppearsAtHundredEpisodes) {
  TempDir dir("leaderboard");
  ExperimentStore experiments(dir / "experiments.jsonl");
  Leaderboard board(dir / "leaderboard.jsonl");
  experiments.register_experiment("ada", "run", false, "MonolithDiscreteSim-v0");
  Experiment e;
  for (int i = 0; i < 99; ++i) {
    e = experiments.record_episode("ada", "run", i < 73 ? 1.0 : 0.0, 10);
    EXPECT_FALSE(board.update(e));
  }
  EXPECT_TRUE(board.top(10).empty());
  e = experiments.record_episode("ada", "run", 0.0, 10);
  const auto entry = board.update(e);
  ASSERT_TRUE(entry);
  EXPECT_DOUBLE_EQ(entry->best_window_avg, 0.73);
  EXPECT_EQ(entry->episodes_count, 100u);
  EXPECT_EQ(board.top(10).size(), 1u);
}

TEST(Leaderboard, RankingAndTopN) {
  auto entry = [](const char* name, double best, std::uint64_t episodes, std::int64_t updated) {
    return protocol::LeaderboardEntry{name, "ada", "MonolithDiscreteSim-v0", episodes, best, updated};
  };
  std::vector<protocol::LeaderboardEntry> v{entry("a", 0.8, 100, 5), entry("b", 0.6, 100, 5), entry("c", 0.9, 100, 5)};
  std::sort(v.begin(), v.end(), ranks_before);
  EXPECT_EQ(v[0].experiment_name, "c");
  EXPECT_EQ(v[1].experiment_name, "a");

  std::vector<protocol::LeaderboardEntry> tie{entry("many", 0.8, 400, 1), entry("few", 0.8, 120, 9)};
  std::sort(tie.begin(), tie.end(), ranks_before);
  EXPECT_EQ(tie[0].experiment_name, "few");

  std::vector<protocol::LeaderboardEntry> same{entry("late", 0.8, 120, 9), entry("early", 0.8, 120, 1)};
  std::sort(same.begin(), same.end(), ranks_before);
  EXPECT_EQ(same[0].experiment_name, "early");

  TempDir dir("leaderboard_top");
  ExperimentStore experiments(dir / "experiments.jsonl");
  Leaderboard board(dir / "leaderboard.jsonl");
  for (auto [name, rate] : {std::pair{"x", 0.8}, std::pair{"y", 0.6}, std::pair{"z", 0.9}}) {
    experiments.register_experiment("ada", name, false, "MonolithDiscreteSim-v0");
    Experiment e;
    for (int i = 0; i < 100; ++i) e = experiments.record_episode("ada", name, i < rate * 100 ? 1.0 : 0.0, 5);
    board.update(e);
  }
  const auto top2 = board.top(2);
  ASSERT_EQ(top2.size(), 2u);
  EXPECT_EQ(top2[0].experiment_name, "z");
  EXPECT_EQ(top2[1].experiment_name, "x");
  EXPECT_EQ(board.top(50).size(), 3u);
}

TEST(Leaderboard, ReconcileRepairsMissedUpdateAndReloadsIdentically) {
  TempDir dir("leaderboard_crash");
  std::vector<protocol::LeaderboardEntry> before;
  {
    ExperimentStore experiments(dir / "experiments.jsonl");
    Leaderboard board(dir / "leaderboard.jsonl");
    experiments.register_experiment("ada", "run", false, "MonolithDiscreteSim-v0");
    Experiment e;
    for (int i = 0; i < 120; ++i) {
      e = experiments.record_episode("ada", "run", i % 3 == 0 ? 1.0 : 0.0, 7);
      if (i < 110) board.update(e);  // the last ten updates are "lost" in a crash
    }
    EXPECT_EQ(board.top(1)[0].episodes_count, 110u);
  }
  ExperimentStore experiments(dir / "experiments.jsonl");
  Leaderboard board(dir / "leaderboard.jsonl");
  EXPECT_EQ(board.reconcile(experiments.all()), 1u);
  before = board.top(10);
  EXPECT_EQ(before[0].episodes_count, 120u);
  EXPECT_EQ(board.reconcile(experiments.all()), 0u);
  Leaderboard again(dir / "leaderboard.jsonl");
  EXPECT_EQ(again.top(10), before);
}
