#pragma once

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <vector>

#include <nlohmann/json.hpp>

namespace clara::dyad {

/// Append-only JSON-lines log. Each record is flushed before append returns.
/// An empty path keeps records in memory only.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path path = {});

  /// Throws Error(StorageError).
  void append(const nlohmann::json& record);

  /// Records in append order. A torn final line left by a crash is dropped and
  /// truncated from the file; any other malformed line throws Error(StorageError).
  std::vector<nlohmann::json> load();

  std::size_t size() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::vector<nlohmann::json> records_;
  bool loaded_ = false;
};

}  // namespace clara::dyad
