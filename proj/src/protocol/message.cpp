#include "gymgate/protocol/message.hpp"

namespace gymgate::protocol {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::string_view type_name(const Message& m) {
  return std::visit(overloaded{
                        [](const Hello&) { return std::string_view("hello"); },
                        [](const HelloOk&) { return std::string_view("hello_ok"); },
                        [](const Make&) { return std::string_view("make"); },
                        [](const MakeOk&) { return std::string_view("make_ok"); },
                        [](const Reset&) { return std::string_view("reset"); },
                        [](const ResetOk&) { return std::string_view("reset_ok"); },
                        [](const Step&) { return std::string_view("step"); },
                        [](const StepOk&) { return std::string_view("step_ok"); },
                        [](const Close&) { return std::string_view("close"); },
                        [](const CloseOk&) { return std::string_view("close_ok"); },
                        [](const ErrorReply&) { return std::string_view("error"); },
                        [](const Heartbeat&) { return std::string_view("heartbeat"); },
                        [](const LeaderboardQuery&) { return std::string_view("leaderboard_query"); },
                        [](const LeaderboardOk&) { return std::string_view("leaderboard_ok"); },
                    },
                    m);
}

bool carries_observation(const Message& m) {
  return std::holds_alternative<ResetOk>(m) || std::holds_alternative<StepOk>(m);
}

void raise_if_error(const Message& m) {
  if (const auto* e = std::get_if<ErrorReply>(&m)) throw Error(e->code, e->detail);
}

}  // namespace gymgate::protocol
