#include "clara/dyad/event_log.hpp"

#include <fstream>
#include <sstream>

#include "clara/error.hpp"

namespace clara::dyad {

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {}

std::vector<nlohmann::json> EventLog::load() {
  std::lock_guard lock(mu_);
  if (loaded_ || path_.empty()) {
    loaded_ = true;
    return records_;
  }
  loaded_ = true;
  std::error_code ec;
  if (!std::filesystem::exists(path_, ec)) return records_;
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw Error(ErrorCode::StorageError, "cannot open event log " + path_.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::size_t pos = 0;
  std::size_t good_end = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    bool complete = nl != std::string::npos;
    auto line = text.substr(pos, complete ? nl - pos : std::string::npos);
    ++line_no;
    try {
      if (!line.empty()) records_.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      if (complete)
        throw Error(ErrorCode::StorageError,
                    "event log " + path_.string() + " line " + std::to_string(line_no) + ": " + e.what());
      break;
    }
    if (!complete) {
      // a parseable record without its newline is still a torn write
      if (!line.empty()) records_.pop_back();
      break;
    }
    pos = nl + 1;
    good_end = pos;
  }
  if (good_end < text.size()) {
    std::filesystem::resize_file(path_, good_end, ec);
    if (ec) throw Error(ErrorCode::StorageError, "cannot truncate torn record: " + ec.message());
  }
  return records_;
}

void EventLog::append(const nlohmann::json& record) {
  std::lock_guard lock(mu_);
  if (!path_.empty()) {
    if (path_.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(path_.parent_path(), ec);
    }
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw Error(ErrorCode::StorageError, "cannot open event log " + path_.string());
    out << record.dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::StorageError, "write to event log failed");
  }
  records_.push_back(record);
}

std::size_t EventLog::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

}  // namespace clara::dyad
