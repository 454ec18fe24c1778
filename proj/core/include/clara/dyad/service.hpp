#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "clara/domain.hpp"
#include "clara/dyad/event_log.hpp"
#include "clara/dyad/report.hpp"
#include "clara/dyad/transport.hpp"
#include "clara/engine/engine.hpp"
#include "clara/flows/bundle.hpp"

namespace clara::dyad {

struct DyadRecord {
  std::string id;
  Arm arm = Arm::CONTROL;
  std::string visit_date;  // YYYY-MM-DD
  std::string clinic_id;
  std::optional<std::string> parent_session;
  std::optional<std::string> adolescent_session;

  bool operator==(const DyadRecord&) const = default;
};

nlohmann::ordered_json to_json(const DyadRecord& d);

/// Whether `arm` lets `role` use the app.
bool arm_permits(Arm arm, Audience role);

struct ServiceOptions {
  std::shared_ptr<const flows::Bundle> bundle;
  /// Empty keeps the event log in memory.
  std::filesystem::path storage_path;
  /// Null makes transmit_report throw EndpointMisconfigured.
  std::shared_ptr<Transport> transport;
  RetryPolicy retry;
  std::function<engine::Clock::time_point()> clock;
  /// Source of per-session RNG seeds.
  std::function<std::uint64_t()> seed_source;
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct SessionView {
  std::string session_id;
  std::string dyad_id;
  Audience role = Audience::parent;
  bool finished = false;
  engine::RenderStep step;
};

nlohmann::ordered_json to_json(const SessionView& v);

/// Dyads, their sessions, flagged questions and clinic reports, persisted as an
/// append-only event log that is replayed on construction. Operations on one
/// dyad are serialized; different dyads proceed concurrently.
class DyadService {
 public:
  /// Throws Error(StorageError) when the log cannot be replayed.
  explicit DyadService(ServiceOptions options);
  ~DyadService();

  DyadService(const DyadService&) = delete;
  DyadService& operator=(const DyadService&) = delete;

  /// Throws Error(InvalidArgument) for a malformed visit date or empty clinic id.
  DyadRecord create_dyad(Arm arm, const std::string& visit_date, const std::string& clinic_id);
  DyadRecord dyad(const std::string& dyad_id) const;
  std::vector<DyadRecord> dyads() const;

  /// Throws Error: UnknownDyad, ArmViolation, SessionExists, MissingBinding.
  SessionView start_session(const std::string& dyad_id, Audience role, const engine::Bindings& bindings = {});
  /// Throws Error(UnknownSession).
  SessionView step(const std::string& session_id) const;
  /// Throws Error(UnknownSession) and every error of Engine::advance.
  SessionView choose(const std::string& session_id, std::size_t index);
  engine::SessionState session(const std::string& session_id) const;

  /// Throws Error: UnknownDyad, ArmViolation, PhaseNotReached, InvalidQuestion.
  FlaggedQuestion flag_question(const std::string& dyad_id, Audience author, const std::string& topic,
                                const std::string& text);
  std::vector<FlaggedQuestion> questions(const std::string& dyad_id) const;
  std::vector<BarrierItem> barriers(const std::string& dyad_id) const;

  /// Current draft report, replacing any untransmitted draft. A draft whose
  /// delivery failed is frozen: it is returned unchanged until it is delivered,
  /// and later questions go into the next report.
  /// Throws Error: UnknownDyad, NoFinishedSession.
  ClinicReport compile_report(const std::string& dyad_id);
  /// Transmits the latest report, compiling it first when no draft exists.
  /// Idempotent: a transmitted report returns its stored receipt, and a retry
  /// after a failed delivery resends the same document under the same key.
  /// Throws DeliveryError, Error(EndpointMisconfigured).
  DeliveryReceipt transmit_report(const std::string& dyad_id);

  /// Transmitted reports followed by the current draft, if any.
  std::vector<ClinicReport> reports(const std::string& dyad_id) const;
  std::vector<DeliveryReceipt> receipts(const std::string& dyad_id) const;

  /// Materialized state of every dyad and session, for comparison after a restart.
  nlohmann::ordered_json snapshot() const;
  std::size_t log_size() const { return log_.size(); }

  const flows::Bundle& bundle() const { return *options_.bundle; }

 private:
  struct DyadState;
  struct SessionSlot;

  DyadState& dyad_state(const std::string& dyad_id) const;
  SessionSlot& session_slot(const std::string& session_id) const;
  const engine::Engine& engine_for(Audience role) const;

  void replay_log();
  void apply(const nlohmann::json& record);
  void capture_effects(DyadState& d, const engine::SessionState& s, std::size_t from);
  FlaggedQuestion add_question(DyadState& d, FlaggedQuestion q);
  ClinicReport build_report(const DyadState& d) const;
  ClinicReport compile_locked(DyadState& d);
  SessionView view(const SessionSlot& slot) const;
  engine::Clock::time_point now() const;

  ServiceOptions options_;
  EventLog log_;
  std::unique_ptr<engine::Engine> parent_engine_;
  std::unique_ptr<engine::Engine> adolescent_engine_;

  mutable std::shared_mutex registry_mu_;
  std::map<std::string, std::unique_ptr<DyadState>> dyads_;
  std::map<std::string, std::unique_ptr<SessionSlot>> sessions_;
  std::uint32_t next_dyad_ = 1;
  std::uint32_t next_session_ = 1;
  bool replaying_ = false;
  std::optional<std::uint64_t> next_seed_;
};

}  // namespace clara::dyad
