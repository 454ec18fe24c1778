#include "clara/dyad/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>

#include "clara/error.hpp"

namespace clara::dyad {

namespace {

std::optional<std::string> from_env(std::string_view key) {
  const char* v = std::getenv(std::string(key).c_str());
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

std::optional<int> parse_port(std::string_view s) {
  int port = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), port);
  if (ec != std::errc() || ptr != s.data() + s.size() || port < 0 || port > 65535) return std::nullopt;
  return port;
}

}  // namespace

ServiceConfig load_config(const EnvLookup& lookup) {
  auto get = lookup ? lookup : EnvLookup(from_env);
  ServiceConfig c;
  if (auto v = get("CLARA_STORAGE_PATH")) c.storage_path = *v;
  if (auto v = get("CLARA_CLINIC_ENDPOINT")) c.clinic_endpoint = *v;
  if (auto v = get("CLARA_BUNDLE_DIR")) c.bundle_dir = *v;
  if (auto v = get("CLARA_BIND_ADDRESS")) c.bind_address = *v;
  if (auto v = get("CLARA_API_TOKEN")) c.api_token = *v;
  return c;
}

std::string Endpoint::base() const { return scheme + "://" + host + ":" + std::to_string(port); }

std::string Endpoint::to_string() const { return base() + path; }

Endpoint parse_endpoint(std::string_view d) {
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::EndpointMisconfigured, "clinic endpoint '" + std::string(d) + "': " + why);
  };
  Endpoint e;
  auto sep = d.find("://");
  if (sep == std::string_view::npos) throw bad("missing scheme");
  e.scheme = std::string(d.substr(0, sep));
  if (e.scheme != "http" && e.scheme != "https") throw bad("unsupported scheme '" + e.scheme + "'");
  auto rest = d.substr(sep + 3);
  auto slash_at = std::find(rest.begin(), rest.end(), '/');
  auto slash = slash_at == rest.end() ? std::string_view::npos : std::size_t(slash_at - rest.begin());
  auto authority = rest.substr(0, slash);
  if (slash != std::string_view::npos) e.path = std::string(rest.substr(slash));
  auto colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    auto port = parse_port(authority.substr(colon + 1));
    if (!port || *port == 0) throw bad("invalid port");
    e.port = *port;
    authority = authority.substr(0, colon);
  } else {
    e.port = e.scheme == "https" ? 443 : 80;
  }
  if (authority.empty()) throw bad("missing host");
  e.host = std::string(authority);
  return e;
}

std::pair<std::string, int> parse_bind_address(std::string_view address) {
  auto colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0)
    throw Error(ErrorCode::InvalidArgument, "bind address must be host:port, got '" + std::string(address) + "'");
  auto port = parse_port(address.substr(colon + 1));
  if (!port) throw Error(ErrorCode::InvalidArgument, "invalid port in '" + std::string(address) + "'");
  return {std::string(address.substr(0, colon)), *port};
}

}  // namespace clara::dyad
