#include "gymgate/gateway/jsonl.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>

#include "gymgate/error.hpp"

namespace gymgate::gateway {

namespace {

[[noreturn]] void storage_error(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::StorageFailure, path.string() + ": " + what);
}

std::uint64_t file_size(int fd, const std::filesystem::path& path) {
  struct stat st {};
  if (::fstat(fd, &st) != 0) storage_error(path, std::string("fstat: ") + std::strerror(errno));
  return static_cast<std::uint64_t>(st.st_size);
}

}  // namespace

JsonlFile::JsonlFile(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) storage_error(path_, std::string("open: ") + std::strerror(errno));
}

JsonlFile::~JsonlFile() {
  if (fd_ >= 0) ::close(fd_);
}

std::vector<nlohmann::json> JsonlFile::read_new() {
  std::vector<nlohmann::json> records;
  const std::uint64_t size = file_size(fd_, path_);
  if (size <= offset_) return records;
  std::string buffer(size - offset_, '\0');
  std::size_t got = 0;
  while (got < buffer.size()) {
    const ssize_t n = ::pread(fd_, buffer.data() + got, buffer.size() - got, static_cast<off_t>(offset_ + got));
    if (n < 0) {
      if (errno == EINTR) continue;
      storage_error(path_, std::string("read: ") + std::strerror(errno));
    }
    if (n == 0) break;
    got += static_cast<std::size_t>(n);
  }
  buffer.resize(got);

  std::size_t start = 0;
  while (true) {
    const std::size_t nl = buffer.find('\n', start);
    if (nl == std::string::npos) break;  // incomplete tail, picked up later or repaired
    ++line_number_;
    const std::string_view line(buffer.data() + start, nl - start);
    if (!line.empty()) {
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) storage_error(path_, "corrupt record on line " + std::to_string(line_number_));
      const auto v = j.find("v");
      if (v == j.end() || *v != kRecordVersion) {
        storage_error(path_, "unsupported record version on line " + std::to_string(line_number_));
      }
      records.push_back(std::move(j));
    }
    start = nl + 1;
  }
  offset_ += start;
  return records;
}

void JsonlFile::locked(const std::function<void()>& fn) {
  while (::flock(fd_, LOCK_EX) != 0) {
    if (errno != EINTR) storage_error(path_, std::string("flock: ") + std::strerror(errno));
  }
  holding_lock_ = true;
  try {
    repair_tail();
    fn();
  } catch (...) {
    holding_lock_ = false;
    ::flock(fd_, LOCK_UN);
    throw;
  }
  holding_lock_ = false;
  ::flock(fd_, LOCK_UN);
}

void JsonlFile::repair_tail() {
  const std::uint64_t size = file_size(fd_, path_);
  if (size == 0) return;
  char last = 0;
  if (::pread(fd_, &last, 1, static_cast<off_t>(size - 1)) != 1) storage_error(path_, "cannot read tail");
  if (last == '\n') return;
  // Walk back to the last newline and drop the partial record.
  std::uint64_t keep = size;
  char c = 0;
  while (keep > 0) {
    if (::pread(fd_, &c, 1, static_cast<off_t>(keep - 1)) != 1) storage_error(path_, "cannot read tail");
    if (c == '\n') break;
    --keep;
  }
  if (::ftruncate(fd_, static_cast<off_t>(keep)) != 0) {
    storage_error(path_, std::string("truncate: ") + std::strerror(errno));
  }
  if (offset_ > keep) offset_ = keep;
}

void JsonlFile::append(nlohmann::json record) {
  if (!holding_lock_) storage_error(path_, "append outside locked()");
  record["v"] = kRecordVersion;
  const std::string line = record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      storage_error(path_, std::string("write: ") + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fdatasync(fd_) != 0) storage_error(path_, std::string("sync: ") + std::strerror(errno));
}

}  // namespace gymgate::gateway
