#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace clara::dyad {

/// Service configuration, read from CLARA_* environment keys.
struct ServiceConfig {
  std::filesystem::path storage_path;  // CLARA_STORAGE_PATH; empty keeps the log in memory
  std::string clinic_endpoint;         // CLARA_CLINIC_ENDPOINT
  std::filesystem::path bundle_dir;    // CLARA_BUNDLE_DIR
  std::string bind_address = "127.0.0.1:8080";  // CLARA_BIND_ADDRESS
  std::string api_token;               // CLARA_API_TOKEN; empty disables the check
};

using EnvLookup = std::function<std::optional<std::string>(std::string_view key)>;

/// Reads the process environment unless `lookup` is given.
ServiceConfig load_config(const EnvLookup& lookup = {});

struct Endpoint {
  std::string scheme;  // http or https
  std::string host;
  int port = 0;
  std::string path = "/";

  std::string base() const;
  std::string to_string() const;
};

/// Parses `http[s]://host[:port][/path]`. Throws Error(EndpointMisconfigured).
Endpoint parse_endpoint(std::string_view descriptor);

/// Splits `host:port`. Throws Error(InvalidArgument).
std::pair<std::string, int> parse_bind_address(std::string_view address);

}  // namespace clara::dyad
