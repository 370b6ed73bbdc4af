#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gymgate/gateway/jsonl.hpp"
#include "gymgate/gateway/time.hpp"

namespace gymgate::gateway {

struct User {
  std::string id;     // the user name
  std::string token;  // 32 lowercase hex characters
  TimePoint created_at;

  bool operator==(const User&) const = default;
};

/// Users and their access tokens, backed by users.jsonl.
class UserStore {
 public:
  explicit UserStore(const std::filesystem::path& file);

  /// Creates a user with a fresh random token. NameTaken if it exists,
  /// BadRequest for an empty or oversized name.
  User add(const std::string& name, TimePoint now = Clock::now());

  std::optional<User> by_token(const std::string& token);
  std::optional<User> by_name(const std::string& name);
  std::vector<User> all();

 private:
  void refresh_locked();

  std::mutex mutex_;
  JsonlFile file_;
  std::vector<User> users_;
};

/// 32 hex characters from the system entropy source.
std::string generate_token();

}  // namespace gymgate::gateway
