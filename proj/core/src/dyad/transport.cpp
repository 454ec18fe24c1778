#include "clara/dyad/transport.hpp"

#include <cmath>
#include <thread>

#include <httplib.h>

namespace clara::dyad {

HttpTransport::HttpTransport(Endpoint endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {
  if (endpoint_.scheme != "http")
    throw Error(ErrorCode::EndpointMisconfigured, "only http clinic endpoints are supported, got " + endpoint_.scheme);
}

SendResult HttpTransport::send(const std::string& key, const std::string& body) {
  httplib::Client cli(endpoint_.host, endpoint_.port);
  auto secs = timeout_.count() / 1000;
  auto usecs = (timeout_.count() % 1000) * 1000;
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  httplib::Headers headers{{"Idempotency-Key", key}};
  auto res = cli.Post(endpoint_.path, headers, body, "application/json");
  if (!res) return {false, 0, "connection failed: " + httplib::to_string(res.error())};
  bool ok = (res->status >= 200 && res->status < 300) || res->status == 409;
  return {ok, res->status, ok ? std::string() : "clinic endpoint answered " + std::to_string(res->status)};
}

SendResult InboxTransport::send(const std::string& key, const std::string& body) {
  std::lock_guard lock(mu_);
  ++attempts_;
  if (fail_ > 0) {
    --fail_;
    return {false, 503, "inbox unavailable"};
  }
  docs_.emplace(key, body);
  if (drop_ack_ > 0) {
    --drop_ack_;
    return {false, 0, "acknowledgement lost"};
  }
  return {true, 202, {}};
}

void InboxTransport::fail_next(int n) {
  std::lock_guard lock(mu_);
  fail_ = n;
}

void InboxTransport::drop_ack_next(int n) {
  std::lock_guard lock(mu_);
  drop_ack_ = n;
}

std::size_t InboxTransport::accepted() const {
  std::lock_guard lock(mu_);
  return docs_.size();
}

std::size_t InboxTransport::attempts() const {
  std::lock_guard lock(mu_);
  return attempts_;
}

std::map<std::string, std::string> InboxTransport::documents() const {
  std::lock_guard lock(mu_);
  return docs_;
}

std::shared_ptr<Transport> make_transport(std::string_view descriptor) {
  if (descriptor.empty()) throw Error(ErrorCode::EndpointMisconfigured, "no clinic endpoint configured");
  return std::make_shared<HttpTransport>(parse_endpoint(descriptor));
}

nlohmann::ordered_json to_json(const DeliveryReceipt& r) {
  nlohmann::ordered_json j;
  j["dyad_id"] = r.dyad_id;
  j["sequence"] = r.sequence;
  j["report_hash"] = r.report_hash;
  j["idempotency_key"] = r.idempotency_key;
  j["endpoint"] = r.endpoint;
  j["attempts"] = r.attempts;
  j["status"] = r.status;
  j["delivered_at"] = engine::iso_timestamp(r.delivered_at);
  return j;
}

DeliveryReceipt receipt_from_json(const nlohmann::json& j) {
  try {
    DeliveryReceipt r;
    r.dyad_id = j.at("dyad_id").get<std::string>();
    r.sequence = j.at("sequence").get<std::uint32_t>();
    r.report_hash = j.at("report_hash").get<std::string>();
    r.idempotency_key = j.at("idempotency_key").get<std::string>();
    r.endpoint = j.at("endpoint").get<std::string>();
    r.attempts = j.at("attempts").get<int>();
    r.status = j.at("status").get<int>();
    r.delivered_at = engine::parse_iso_timestamp(j.at("delivered_at").get<std::string>());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidRecord, std::string("malformed receipt: ") + e.what());
  }
}

DeliveryError::DeliveryError(int attempts, const std::string& last_detail)
    : Error(ErrorCode::DeliveryFailure,
            "delivery failed after " + std::to_string(attempts) + " attempt(s): " + last_detail),
      attempts_(attempts) {}

DeliveryReceipt deliver(Transport& transport, const ClinicReport& report, const RetryPolicy& policy,
                        engine::Clock::time_point now, const std::function<void(std::chrono::milliseconds)>& sleep) {
  const auto key = idempotency_key(report);
  const auto body = to_json(report).dump();
  auto backoff = policy.initial_backoff;
  std::string last;
  const int max_attempts = std::max(1, policy.max_attempts);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    auto res = transport.send(key, body);
    if (res.accepted) {
      DeliveryReceipt r;
      r.dyad_id = report.dyad_id;
      r.sequence = report.sequence;
      r.report_hash = report_hash(report);
      r.idempotency_key = key;
      r.endpoint = transport.describe();
      r.attempts = attempt;
      r.status = res.status;
      r.delivered_at = now;
      return r;
    }
    last = res.detail;
    if (attempt == max_attempts) break;
    if (sleep) sleep(backoff);
    else std::this_thread::sleep_for(backoff);
    backoff = std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(backoff.count() * policy.multiplier)));
  }
  throw DeliveryError(max_attempts, last);
}

}  // namespace clara::dyad
