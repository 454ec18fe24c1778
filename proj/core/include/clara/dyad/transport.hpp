#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "clara/dyad/config.hpp"
#include "clara/dyad/report.hpp"
#include "clara/error.hpp"

namespace clara::dyad {

struct SendResult {
  bool accepted = false;
  int status = 0;
  std::string detail;
};

/// Moves one report document to the clinic. Implementations must not throw for
/// delivery problems; they report them in SendResult.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual SendResult send(const std::string& key, const std::string& body) = 0;
  virtual std::string describe() const = 0;
};

/// POSTs the document with an Idempotency-Key header. 2xx and 409 count as accepted.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(Endpoint endpoint, std::chrono::milliseconds timeout = std::chrono::seconds(5));
  SendResult send(const std::string& key, const std::string& body) override;
  std::string describe() const override { return endpoint_.to_string(); }

 private:
  Endpoint endpoint_;
  std::chrono::milliseconds timeout_;
};

/// In-process clinic inbox that deduplicates by idempotency key. Failures can be
/// injected to simulate an unreachable endpoint.
class InboxTransport : public Transport {
 public:
  SendResult send(const std::string& key, const std::string& body) override;
  std::string describe() const override { return "inbox:"; }

  /// The next `n` sends fail before reaching the inbox.
  void fail_next(int n);
  /// The next `n` sends are stored but the acknowledgement is lost.
  void drop_ack_next(int n);

  std::size_t accepted() const;
  std::size_t attempts() const;
  std::map<std::string, std::string> documents() const;

 private:
  mutable std::mutex mu_;
  int fail_ = 0;
  int drop_ack_ = 0;
  std::size_t attempts_ = 0;
  std::map<std::string, std::string> docs_;
};

/// Builds an HttpTransport from a descriptor. Throws Error(EndpointMisconfigured).
std::shared_ptr<Transport> make_transport(std::string_view descriptor);

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{100};
  double multiplier = 2.0;
};

struct DeliveryReceipt {
  std::string dyad_id;
  std::uint32_t sequence = 1;
  std::string report_hash;
  std::string idempotency_key;
  std::string endpoint;
  int attempts = 0;
  int status = 0;
  engine::Clock::time_point delivered_at;

  bool operator==(const DeliveryReceipt&) const = default;
};

nlohmann::ordered_json to_json(const DeliveryReceipt& r);
DeliveryReceipt receipt_from_json(const nlohmann::json& j);

/// Raised after every attempt failed; retryable by calling transmit again.
class DeliveryError : public Error {
 public:
  DeliveryError(int attempts, const std::string& last_detail);
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

/// Sends with exponential backoff. `sleep` is injectable for tests.
/// Throws DeliveryError.
DeliveryReceipt deliver(Transport& transport, const ClinicReport& report, const RetryPolicy& policy,
                        engine::Clock::time_point now,
                        const std::function<void(std::chrono::milliseconds)>& sleep = {});

}  // namespace clara::dyad
