#include "clara/dyad/http_api.hpp"

#include <httplib.h>

#include "../text_util.hpp"
#include "clara/flows/routing.hpp"

namespace clara::dyad {

namespace {

using ojson = nlohmann::ordered_json;

ApiResponse reply(int status, const ojson& body) { return {status, body.dump()}; }

ApiResponse error_reply(int status, std::string_view code, const std::string& message) {
  ojson e;
  e["code"] = code;
  e["message"] = message;
  return reply(status, ojson{{"error", e}});
}

nlohmann::json parse_body(const ApiRequest& req) {
  if (req.body.empty()) return nlohmann::json::object();
  try {
    auto j = nlohmann::json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed JSON body: ") + e.what());
  }
}

std::string need_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

Audience need_role(const nlohmann::json& j, const char* key) {
  auto a = parse_audience(need_string(j, key));
  if (!a || *a == Audience::both) throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be parent or adolescent");
  return *a;
}

ojson report_list(const std::vector<ClinicReport>& reports) {
  ojson arr = ojson::array();
  for (const auto& r : reports) {
    auto j = to_json(r);
    j["hash"] = report_hash(r);
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownDyad:
    case ErrorCode::UnknownSession:
      return 404;
    case ErrorCode::ArmViolation:
    case ErrorCode::SessionExists:
    case ErrorCode::PhaseNotReached:
    case ErrorCode::NoFinishedSession:
    case ErrorCode::ReportImmutable:
    case ErrorCode::SessionFinished:
    case ErrorCode::GuardRace:
      return 409;
    case ErrorCode::InvalidQuestion:
    case ErrorCode::InvalidChoiceIndex:
    case ErrorCode::InvalidArgument:
    case ErrorCode::MissingBinding:
    case ErrorCode::OutOfRange:
    case ErrorCode::TypeError:
      return 400;
    case ErrorCode::DeliveryFailure:
      return 502;
    case ErrorCode::EndpointMisconfigured:
      return 503;
    default:
      return 500;
  }
}

HttpApi::HttpApi(DyadService& service, std::string api_token) : service_(service), token_(std::move(api_token)) {}

ApiResponse HttpApi::handle(const ApiRequest& req) const {
  if (!token_.empty() && req.path != "/health") {
    auto it = req.headers.find("authorization");
    if (it == req.headers.end() || it->second != "Bearer " + token_)
      return error_reply(401, "Unauthorized", "missing or invalid bearer token");
  }
  try {
    return route(req);
  } catch (const DeliveryError& e) {
    auto r = error_reply(502, to_string(e.code()), e.what());
    auto j = nlohmann::ordered_json::parse(r.body);
    j["error"]["attempts"] = e.attempts();
    return reply(502, j);
  } catch (const Error& e) {
    return error_reply(http_status(e.code()), to_string(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_reply(400, "InvalidArgument", e.what());
  }
}

ApiResponse HttpApi::route(const ApiRequest& req) const {
  std::vector<std::string> parts;
  for (auto& p : detail::split(req.path, '/'))
    if (!p.empty()) parts.push_back(p);
  const auto& m = req.method;
  auto not_found = [&] { return error_reply(404, "NotFound", "no route for " + m + " " + req.path); };
  auto bad_method = [&] { return error_reply(405, "MethodNotAllowed", m + " not allowed on " + req.path); };

  if (parts.size() == 1 && parts[0] == "health") {
    if (m != "GET") return bad_method();
    return reply(200, ojson{{"status", "ok"}, {"dyads", service_.dyads().size()}});
  }
  if (parts.size() == 2 && parts[0] == "questions" && parts[1] == "menu") {
    if (m != "GET") return bad_method();
    ojson menu = ojson::object();
    for (const auto& [topic, texts] : flows::question_menu()) menu[topic] = texts;
    return reply(200, menu);
  }
  if (!parts.empty() && parts[0] == "dyads") {
    if (parts.size() == 1) {
      if (m != "POST") return bad_method();
      auto body = parse_body(req);
      auto arm = parse_arm(need_string(body, "arm"));
      if (!arm) throw Error(ErrorCode::InvalidArgument, "'arm' must be CONTROL, PARENT or CHILD");
      auto d = service_.create_dyad(*arm, need_string(body, "visit_date"), need_string(body, "clinic_id"));
      return reply(201, to_json(d));
    }
    const auto& id = parts[1];
    if (parts.size() == 2) {
      if (m != "GET") return bad_method();
      return reply(200, to_json(service_.dyad(id)));
    }
    if (parts.size() == 3 && parts[2] == "sessions") {
      if (m != "POST") return bad_method();
      auto body = parse_body(req);
      engine::Bindings bindings;
      if (body.contains("bindings")) bindings = body.at("bindings").get<engine::Bindings>();
      return reply(201, to_json(service_.start_session(id, need_role(body, "role"), bindings)));
    }
    if (parts.size() == 3 && parts[2] == "questions") {
      if (m == "GET") {
        ojson arr = ojson::array();
        for (const auto& q : service_.questions(id)) arr.push_back(to_json(q));
        return reply(200, ojson{{"dyad_id", id}, {"questions", arr}});
      }
      if (m != "POST") return bad_method();
      auto body = parse_body(req);
      auto q = service_.flag_question(id, need_role(body, "author"), need_string(body, "topic"), need_string(body, "text"));
      return reply(201, to_json(q));
    }
    if (parts.size() == 3 && parts[2] == "report") {
      if (m != "POST") return bad_method();
      auto r = service_.compile_report(id);
      auto j = to_json(r);
      j["hash"] = report_hash(r);
      return reply(200, j);
    }
    if (parts.size() == 3 && parts[2] == "reports") {
      if (m != "GET") return bad_method();
      return reply(200, ojson{{"dyad_id", id}, {"reports", report_list(service_.reports(id))}});
    }
    if (parts.size() == 4 && parts[2] == "report" && parts[3] == "transmit") {
      if (m != "POST") return bad_method();
      return reply(200, to_json(service_.transmit_report(id)));
    }
    return not_found();
  }
  if (parts.size() == 3 && parts[0] == "sessions") {
    const auto& id = parts[1];
    if (parts[2] == "step") {
      if (m != "GET") return bad_method();
      return reply(200, to_json(service_.step(id)));
    }
    if (parts[2] == "choice") {
      if (m != "POST") return bad_method();
      auto body = parse_body(req);
      auto it = body.find("index");
      if (it == body.end() || !it->is_number_unsigned())
        throw Error(ErrorCode::InvalidArgument, "'index' must be a non-negative integer");
      return reply(200, to_json(service_.choose(id, it->get<std::size_t>())));
    }
  }
  return not_found();
}

struct ApiServer::Impl {
  HttpApi api;
  httplib::Server server;

  Impl(DyadService& s, std::string token) : api(s, std::move(token)) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      ApiRequest r;
      r.method = req.method;
      r.path = req.path;
      r.body = req.body;
      for (const auto& [k, v] : req.headers) {
        std::string key = k;
        for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        r.headers[key] = v;
      }
      auto out = api.handle(r);
      res.status = out.status;
      res.set_content(out.body, "application/json");
    };
    const char* any = R"(/.*)";
    server.Get(any, handler);
    server.Post(any, handler);
    server.Put(any, handler);
    server.Delete(any, handler);
  }
};

ApiServer::ApiServer(DyadService& service, std::string api_token)
    : impl_(std::make_unique<Impl>(service, std::move(api_token))) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void ApiServer::serve() { impl_->server.listen_after_bind(); }

void ApiServer::stop() {
  if (impl_) impl_->server.stop();
}

void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace clara::dyad
