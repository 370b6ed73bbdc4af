#include "gymgate/gateway/users.hpp"

#include <random>

#include "gymgate/error.hpp"

namespace gymgate::gateway {

std::string generate_token() {
  static constexpr char kHex[] = "0123456789abcdef";
  std::random_device rd;
  std::string token;
  for (int i = 0; i < 32; ++i) token += kHex[rd() & 0xf];
  return token;
}

UserStore::UserStore(const std::filesystem::path& file) : file_(file) {
  std::lock_guard lock(mutex_);
  refresh_locked();
}

void UserStore::refresh_locked() {
  for (const auto& r : file_.read_new()) {
    try {
      users_.push_back(User{r.at("name").get<std::string>(), r.at("token").get<std::string>(),
                            from_unix_ms(r.at("created_at_ms").get<std::int64_t>())});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::StorageFailure, file_.path().string() + ": malformed user record: " + e.what());
    }
  }
}

User UserStore::add(const std::string& name, TimePoint now) {
  if (name.empty() || name.size() > 128) throw Error(ErrorCode::BadRequest, "user name must be 1..128 characters");
  std::lock_guard lock(mutex_);
  User user{name, generate_token(), now};
  file_.locked([&] {
    refresh_locked();
    for (const auto& u : users_) {
      if (u.id == name) throw Error(ErrorCode::NameTaken, "user '" + name + "' already exists");
    }
    file_.append({{"name", user.id}, {"token", user.token}, {"created_at_ms", to_unix_ms(now)}});
    refresh_locked();
  });
  return user;
}

std::optional<User> UserStore::by_token(const std::string& token) {
  std::lock_guard lock(mutex_);
  refresh_locked();
  for (const auto& u : users_) {
    if (u.token == token) return u;
  }
  return std::nullopt;
}

std::optional<User> UserStore::by_name(const std::string& name) {
  std::lock_guard lock(mutex_);
  refresh_locked();
  for (const auto& u : users_) {
    if (u.id == name) return u;
  }
  return std::nullopt;
}

std::vector<User> UserStore::all() {
  std::lock_guard lock(mutex_);
  refresh_locked();
  return users_;
}

}  // namespace gymgate::gateway
