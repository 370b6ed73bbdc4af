#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "json.hpp"

namespace gymgate::gateway {

inline constexpr int kRecordVersion = 1;

/// Append-only JSON-lines file shared between processes. Every record gets
/// a "v" field. Writers hold an exclusive advisory lock; a torn last line
/// left by a crash is ignored by readers and cut off before the next append.
class JsonlFile {
 public:
  explicit JsonlFile(std::filesystem::path path);
  ~JsonlFile();
  JsonlFile(const JsonlFile&) = delete;
  JsonlFile& operator=(const JsonlFile&) = delete;

  const std::filesystem::path& path() const { return path_; }

  /// Complete records appended since the previous call, in file order.
  /// Throws StorageFailure on a corrupt complete line.
  std::vector<nlohmann::json> read_new();

  /// Runs `fn` under the exclusive lock.
  void locked(const std::function<void()>& fn);

  /// Writes one record and syncs it. Only valid inside locked().
  void append(nlohmann::json record);

 private:
  void repair_tail();

  std::filesystem::path path_;
  int fd_ = -1;
  std::uint64_t offset_ = 0;
  std::uint64_t line_number_ = 0;
  bool holding_lock_ = false;
};

}  // namespace gymgate::gateway
