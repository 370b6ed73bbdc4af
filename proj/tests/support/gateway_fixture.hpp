#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "gymgate/gateway/env_registry.hpp"
#include "gymgate/gateway/server.hpp"
#include "gymgate/net/socket.hpp"
#include "support/temp_dir.hpp"

namespace gymgate::testutil {

/// An in-process gateway on an ephemeral port with one user ("ada") booked
/// on every environment for the next day.
class LocalGateway {
 public:
  explicit LocalGateway(gateway::ServerConfig config = {}, const std::string& tag = "gw") : dir_(tag) {
    config.host = "127.0.0.1";
    config.port = 0;
    config.data_dir = dir_.path();
    server_ = std::make_unique<gateway::Server>(config);
    token = server_->users().add("ada").token;
    const auto now = gateway::Clock::now();
    for (const auto& spec : gateway::env_specs()) {
      server_->bookings().add("ada", spec.name, now - std::chrono::hours(1), now + std::chrono::hours(24));
    }
    server_->start();
  }

  /// A user without any booking.
  std::string add_user(const std::string& name) { return server_->users().add(name).token; }

  net::Address address() const { return {"127.0.0.1", server_->port()}; }
  gateway::Server& server() { return *server_; }
  const TempDir& dir() const { return dir_; }

  std::string token;

 private:
  TempDir dir_;
  std::unique_ptr<gateway::Server> server_;
};

}  // namespace gymgate::testutil
