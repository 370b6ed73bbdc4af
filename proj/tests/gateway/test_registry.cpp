#include <set>
#include <variant>

#include <gtest/gtest.h>

#include "gymgate/error.hpp"
#include "gymgate/gateway/env_registry.hpp"
#include "gymgate/gateway/handshake.hpp"
#include "support/temp_dir.hpp"

using namespace gymgate;
using namespace gymgate::gateway;
using namespace std::chrono_literals;

TEST(EnvRegistry, EightNamesFourVariantsTwoModes) {
  const std::set<std::string> expected = {
      "MonolithDiscreteSim-v0",           "MonolithContinuousSim-v0",
      "MonolithObstaclesDiscreteSim-v0",  "MonolithObstaclesContinuousSim-v0",
      "MonolithDiscreteReal-v0",          "MonolithContinuousReal-v0",
      "MonolithObstaclesDiscreteReal-v0", "MonolithObstaclesContinuousReal-v0",
  };
  std::set<std::string> names;
  for (const auto& spec : env_specs()) names.insert(spec.name);
  EXPECT_EQ(names, expected);
}

TEST(EnvRegistry, SpecFieldsFollowTheName) {
  const auto spec = find_env("MonolithObstaclesContinuousReal-v0");
  ASSERT_TRUE(spec);
  EXPECT_TRUE(spec->obstacles);
  EXPECT_TRUE(spec->real);
  EXPECT_EQ(spec->action_space, sim::ActionSpace::Continuous);
  EXPECT_EQ(spec->family, "MonolithObstaclesContinuous");

  const auto sim_spec = find_env("MonolithDiscreteSim-v0");
  ASSERT_TRUE(sim_spec);
  EXPECT_FALSE(sim_spec->real);
  EXPECT_FALSE(sim_spec->obstacles);
  EXPECT_EQ(sim_spec->action_space, sim::ActionSpace::Discrete);
}

TEST(EnvRegistry, OffWorldPrefixIsAnAlias) {
  for (const auto& spec : env_specs()) {
    const auto alias = find_env("OffWorld" + spec.name);
    ASSERT_TRUE(alias) << spec.name;
    EXPECT_EQ(alias->name, spec.name);
  }
}

TEST(EnvRegistry, UnknownNameListsValidOnes) {
  EXPECT_FALSE(find_env("MonolithDiscreteSim-v1"));
  EXPECT_FALSE(find_env("OffWorld"));
  EXPECT_FALSE(find_env(""));
  try {
    resolve_env("CartPole-v1");
    FAIL() << "expected unknown-env";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownEnv);
    for (const auto& spec : env_specs()) EXPECT_NE(e.detail().find(spec.name), std::string::npos);
  }
}

TEST(EnvRegistry, DefaultWorldsAreValidAndMatchTheVariant) {
  for (const auto& spec : env_specs()) {
    const auto config = default_world_config(spec);
    EXPECT_NO_THROW(sim::validate(config)) << spec.name;
    EXPECT_EQ(config.action_space, spec.action_space);
    EXPECT_EQ(config.obstacles.empty(), !spec.obstacles);
  }
}

class HandshakeTest : public ::testing::Test {
 protected:
  testutil::TempDir dir{"handshake"};
  UserStore users{dir / "users.jsonl"};
  BookingStore bookings{dir / "bookings.jsonl"};
  const TimePoint ten = from_unix_ms(1792404000000);  // 2026-10-19T10:00:00Z
};

TEST_F(HandshakeTest, KnownTokenWithBookingGetsHelloOk) {
  const auto ada = users.add("ada");
  bookings.add("ada", "MonolithDiscreteSim-v0", ten, ten + 1h);
  const auto r = handshake(protocol::Hello{ada.token, "gymctl/0.1"}, users, bookings, ten + 30min, "s42");
  ASSERT_TRUE(std::holds_alternative<protocol::HelloOk>(r.reply));
  EXPECT_EQ(std::get<protocol::HelloOk>(r.reply).session_id, "s42");
  EXPECT_EQ(std::get<protocol::HelloOk>(r.reply).server_version, protocol::kServerVersion);
  EXPECT_EQ(r.user_id, "ada");
}

TEST_F(HandshakeTest, UnknownTokenIsAuthFailed) {
  users.add("ada");
  const auto r = handshake(protocol::Hello{"deadbeef", "gymctl/0.1"}, users, bookings, ten, "s1");
  ASSERT_TRUE(std::holds_alternative<protocol::ErrorReply>(r.reply));
  EXPECT_EQ(std::get<protocol::ErrorReply>(r.reply).code, ErrorCode::AuthFailed);
  EXPECT_FALSE(r.user_id);
}

TEST_F(HandshakeTest, NoCoveringBookingIsRejected) {
  const auto ada = users.add("ada");
  bookings.add("ada", "MonolithDiscreteSim-v0", ten, ten + 1h);
  // The interval is half-open: its end no longer counts.
  for (const TimePoint t : {ten - 1s, ten + 1h}) {
    const auto r = handshake(protocol::Hello{ada.token, "gymctl/0.1"}, users, bookings, t, "s1");
    ASSERT_TRUE(std::holds_alternative<protocol::ErrorReply>(r.reply));
    EXPECT_EQ(std::get<protocol::ErrorReply>(r.reply).code, ErrorCode::NoBooking);
  }
}

TEST_F(HandshakeTest, SomeoneElsesBookingDoesNotCount) {
  const auto ada = users.add("ada");
  users.add("grace");
  bookings.add("grace", "MonolithDiscreteSim-v0", ten, ten + 1h);
  const auto r = handshake(protocol::Hello{ada.token, "gymctl/0.1"}, users, bookings, ten, "s1");
  ASSERT_TRUE(std::holds_alternative<protocol::ErrorReply>(r.reply));
  EXPECT_EQ(std::get<protocol::ErrorReply>(r.reply).code, ErrorCode::NoBooking);
}
