#pragma once

#include <map>
#include <memory>
#include <string>

#include "clara/dyad/service.hpp"

namespace clara::dyad {

struct ApiRequest {
  std::string method;
  std::string path;
  std::string body;
  /// Header names in lower case.
  std::map<std::string, std::string> headers;
};

struct ApiResponse {
  int status = 200;
  std::string body;
};

/// HTTP status used for each error code.
int http_status(ErrorCode code);

/// Routes JSON requests to a DyadService. Transport-independent so it can be
/// exercised without sockets.
///
///   GET  /health
///   GET  /questions/menu
///   POST /dyads                      {arm, visit_date, clinic_id}
///   GET  /dyads/{id}
///   POST /dyads/{id}/sessions        {role, bindings?}
///   GET  /sessions/{id}/step
///   POST /sessions/{id}/choice       {index}
///   POST /dyads/{id}/questions       {author, topic, text}
///   GET  /dyads/{id}/questions
///   POST /dyads/{id}/report
///   GET  /dyads/{id}/reports
///   POST /dyads/{id}/report/transmit
///
/// Errors answer {"error": {"code", "message"}}. When a token is configured every
/// route except /health requires `Authorization: Bearer <token>`.
class HttpApi {
 public:
  explicit HttpApi(DyadService& service, std::string api_token = {});
  ApiResponse handle(const ApiRequest& request) const;

 private:
  ApiResponse route(const ApiRequest& request) const;

  DyadService& service_;
  std::string token_;
};

/// Blocking HTTP server in front of HttpApi.
class ApiServer {
 public:
  explicit ApiServer(DyadService& service, std::string api_token = {});
  ~ApiServer();

  /// Binds without serving; port 0 picks a free port. Returns the bound port.
  /// Throws Error(IoError).
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind.
  void serve();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace clara::dyad
