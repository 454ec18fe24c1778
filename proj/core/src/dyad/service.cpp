#include "clara/dyad/service.hpp"

#include <algorithm>
#include <random>
#include <regex>

#include "clara/flows/routing.hpp"

namespace clara::dyad {

using engine::Clock;

namespace {

thread_local std::optional<Clock::time_point> t_op_time;

/// Pins the timestamp used by every event of one service operation.
class OpTime {
 public:
  explicit OpTime(Clock::time_point tp) : prev_(t_op_time) { t_op_time = tp; }
  ~OpTime() { t_op_time = prev_; }
  OpTime(const OpTime&) = delete;
  OpTime& operator=(const OpTime&) = delete;

 private:
  std::optional<Clock::time_point> prev_;
};

Clock::time_point floor_ms(Clock::time_point tp) {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(tp);
}

std::string numbered(char prefix, std::uint32_t n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%04u", prefix, n);
  return buf;
}

bool valid_date(const std::string& s) {
  static const std::regex re(R"(\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01]))");
  return std::regex_match(s, re);
}

Audience role_from(const nlohmann::json& j, const char* key) {
  auto a = parse_audience(j.at(key).get<std::string>());
  if (!a || *a == Audience::both) throw Error(ErrorCode::StorageError, std::string("invalid ") + key + " in log");
  return *a;
}

}  // namespace

bool arm_permits(Arm arm, Audience role) {
  switch (arm) {
    case Arm::CONTROL:
      return false;
    case Arm::PARENT:
      return role == Audience::parent;
    case Arm::CHILD:
      return role == Audience::parent || role == Audience::adolescent;
  }
  return false;
}

nlohmann::ordered_json to_json(const DyadRecord& d) {
  nlohmann::ordered_json j;
  j["dyad_id"] = d.id;
  j["arm"] = to_string(d.arm);
  j["visit_date"] = d.visit_date;
  j["clinic_id"] = d.clinic_id;
  j["parent_session"] = d.parent_session ? nlohmann::ordered_json(*d.parent_session) : nlohmann::ordered_json();
  j["adolescent_session"] =
      d.adolescent_session ? nlohmann::ordered_json(*d.adolescent_session) : nlohmann::ordered_json();
  return j;
}

nlohmann::ordered_json to_json(const SessionView& v) {
  nlohmann::ordered_json j;
  j["session_id"] = v.session_id;
  j["dyad_id"] = v.dyad_id;
  j["role"] = to_string(v.role);
  j["finished"] = v.finished;
  j["step"] = engine::to_json(v.step);
  return j;
}

struct DyadService::SessionSlot {
  std::string id;
  std::string dyad_id;
  Audience role = Audience::parent;
  engine::SessionState state;
};

struct DyadService::DyadState {
  DyadRecord record;
  mutable std::mutex mu;
  std::vector<FlaggedQuestion> questions;
  std::vector<BarrierItem> barriers;
  std::size_t questions_sent = 0;
  std::size_t barriers_sent = 0;
  std::vector<ClinicReport> transmitted;
  std::vector<DeliveryReceipt> receipts;
  std::optional<ClinicReport> draft;
  std::size_t draft_questions = 0;
  std::size_t draft_barriers = 0;
  bool in_flight = false;  // delivery of the draft was attempted; it may have reached the clinic
  std::vector<const SessionSlot*> sessions;
};

DyadService::DyadService(ServiceOptions options) : options_(std::move(options)), log_(options_.storage_path) {
  if (!options_.bundle) throw Error(ErrorCode::InvalidArgument, "service requires a content bundle");
  auto make = [this](Audience a) {
    auto opts = options_.bundle->engine_options();
    opts.clock = [this] { return now(); };
    return std::make_unique<engine::Engine>(options_.bundle->script_ptr(a), std::move(opts));
  };
  parent_engine_ = make(Audience::parent);
  adolescent_engine_ = make(Audience::adolescent);
  if (!options_.seed_source) {
    options_.seed_source = [] {
      std::random_device rd;
      return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    };
  }
  replay_log();
}

DyadService::~DyadService() = default;

Clock::time_point DyadService::now() const {
  if (t_op_time) return *t_op_time;
  return floor_ms(options_.clock ? options_.clock() : Clock::now());
}

const engine::Engine& DyadService::engine_for(Audience role) const {
  return role == Audience::adolescent ? *adolescent_engine_ : *parent_engine_;
}

DyadService::DyadState& DyadService::dyad_state(const std::string& dyad_id) const {
  std::shared_lock lock(registry_mu_);
  auto it = dyads_.find(dyad_id);
  if (it == dyads_.end()) throw Error(ErrorCode::UnknownDyad, "unknown dyad '" + dyad_id + "'");
  return *it->second;
}

DyadService::SessionSlot& DyadService::session_slot(const std::string& session_id) const {
  std::shared_lock lock(registry_mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "unknown session '" + session_id + "'");
  return *it->second;
}

void DyadService::replay_log() {
  replaying_ = true;
  try {
    for (const auto& rec : log_.load()) apply(rec);
  } catch (const Error& e) {
    replaying_ = false;
    if (e.code() == ErrorCode::StorageError) throw;
    throw Error(ErrorCode::StorageError, std::string("event log replay failed: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    replaying_ = false;
    throw Error(ErrorCode::StorageError, std::string("malformed event log record: ") + e.what());
  }
  replaying_ = false;
}

void DyadService::apply(const nlohmann::json& rec) {
  OpTime op(engine::parse_iso_timestamp(rec.at("ts").get<std::string>()));
  const auto type = rec.at("type").get<std::string>();
  if (type == "dyad_created") {
    auto arm = parse_arm(rec.at("arm").get<std::string>());
    if (!arm) throw Error(ErrorCode::StorageError, "invalid arm in log");
    auto d = create_dyad(*arm, rec.at("visit_date").get<std::string>(), rec.at("clinic_id").get<std::string>());
    if (d.id != rec.at("dyad_id").get<std::string>())
      throw Error(ErrorCode::StorageError, "dyad id mismatch on replay: " + d.id);
    return;
  }
  if (type == "session_started") {
    next_seed_ = rec.at("seed").get<std::uint64_t>();
    auto v = start_session(rec.at("dyad_id").get<std::string>(), role_from(rec, "role"),
                           rec.at("bindings").get<engine::Bindings>());
    if (v.session_id != rec.at("session_id").get<std::string>())
      throw Error(ErrorCode::StorageError, "session id mismatch on replay: " + v.session_id);
    return;
  }
  if (type == "choice") {
    choose(rec.at("session_id").get<std::string>(), rec.at("index").get<std::size_t>());
    return;
  }
  if (type == "question_flagged") {
    flag_question(rec.at("dyad_id").get<std::string>(), role_from(rec, "author"), rec.at("topic").get<std::string>(),
                  rec.at("text").get<std::string>());
    return;
  }
  if (type == "report_compiled") {
    auto r = compile_report(rec.at("dyad_id").get<std::string>());
    if (report_hash(r) != rec.at("hash").get<std::string>())
      throw Error(ErrorCode::StorageError, "recompiled report differs from the logged report");
    return;
  }
  if (type == "report_transmitted") {
    auto& d = dyad_state(rec.at("dyad_id").get<std::string>());
    std::lock_guard lock(d.mu);
    auto receipt = receipt_from_json(rec.at("receipt"));
    if (!d.draft || report_hash(*d.draft) != receipt.report_hash)
      throw Error(ErrorCode::StorageError, "transmitted report is not the logged draft");
    d.questions_sent = d.draft_questions;
    d.barriers_sent = d.draft_barriers;
    d.transmitted.push_back(std::move(*d.draft));
    d.draft.reset();
    d.in_flight = false;
    d.receipts.push_back(std::move(receipt));
    return;
  }
  if (type == "delivery_failed") {
    auto& d = dyad_state(rec.at("dyad_id").get<std::string>());
    std::lock_guard lock(d.mu);
    if (!d.draft || report_hash(*d.draft) != rec.at("hash").get<std::string>())
      throw Error(ErrorCode::StorageError, "failed delivery does not match the logged draft");
    d.in_flight = true;
    return;
  }
  throw Error(ErrorCode::StorageError, "unknown log record type '" + type + "'");
}

DyadRecord DyadService::create_dyad(Arm arm, const std::string& visit_date, const std::string& clinic_id) {
  if (!valid_date(visit_date))
    throw Error(ErrorCode::InvalidArgument, "visit date must be YYYY-MM-DD, got '" + visit_date + "'");
  if (clinic_id.empty()) throw Error(ErrorCode::InvalidArgument, "clinic id must not be empty");
  std::optional<OpTime> op;
  if (!t_op_time) op.emplace(now());
  std::unique_lock lock(registry_mu_);
  auto d = std::make_unique<DyadState>();
  d->record = {numbered('D', next_dyad_), arm, visit_date, clinic_id, std::nullopt, std::nullopt};
  if (!replaying_) {
    log_.append({{"type", "dyad_created"},
                 {"ts", engine::iso_timestamp(now())},
                 {"dyad_id", d->record.id},
                 {"arm", to_string(arm)},
                 {"visit_date", visit_date},
                 {"clinic_id", clinic_id}});
  }
  ++next_dyad_;
  auto record = d->record;
  dyads_.emplace(record.id, std::move(d));
  return record;
}

DyadRecord DyadService::dyad(const std::string& dyad_id) const {
  auto& d = dyad_state(dyad_id);
  std::lock_guard lock(d.mu);
  return d.record;
}

std::vector<DyadRecord> DyadService::dyads() const {
  std::vector<DyadState*> all;
  {
    std::shared_lock lock(registry_mu_);
    for (const auto& [id, d] : dyads_) all.push_back(d.get());
  }
  std::vector<DyadRecord> out;
  for (auto* d : all) {
    std::lock_guard lock(d->mu);
    out.push_back(d->record);
  }
  return out;
}

SessionView DyadService::view(const SessionSlot& slot) const {
  SessionView v;
  v.session_id = slot.id;
  v.dyad_id = slot.dyad_id;
  v.role = slot.role;
  v.finished = slot.state.finished;
  const auto& eng = engine_for(slot.role);
  v.step = slot.state.finished ? eng.closing_step(slot.state) : eng.current_step(slot.state);
  return v;
}

SessionView DyadService::start_session(const std::string& dyad_id, Audience role, const engine::Bindings& bindings) {
  if (role == Audience::both) throw Error(ErrorCode::InvalidArgument, "session role must be parent or adolescent");
  std::optional<OpTime> op;
  if (!t_op_time) op.emplace(now());
  auto& d = dyad_state(dyad_id);
  std::lock_guard dlock(d.mu);
  if (!arm_permits(d.record.arm, role))
    throw Error(ErrorCode::ArmViolation, std::string(to_string(d.record.arm)) + " arm does not permit a " +
                                             std::string(to_string(role)) + " session");
  auto& existing = role == Audience::parent ? d.record.parent_session : d.record.adolescent_session;
  if (existing) throw Error(ErrorCode::SessionExists, "dyad already has a " + std::string(to_string(role)) + " session");

  std::uint64_t seed = next_seed_ ? *next_seed_ : options_.seed_source();
  next_seed_.reset();
  auto slot = std::make_unique<SessionSlot>();
  auto* sp = slot.get();
  std::string id;
  {
    std::unique_lock lock(registry_mu_);
    id = numbered('S', next_session_);
    slot->state = engine_for(role).start_session(role, bindings, seed, id);
    if (!replaying_) {
      log_.append({{"type", "session_started"},
                   {"ts", engine::iso_timestamp(now())},
                   {"dyad_id", dyad_id},
                   {"session_id", id},
                   {"role", to_string(role)},
                   {"bindings", bindings},
                   {"seed", seed}});
    }
    ++next_session_;
    slot->id = id;
    slot->dyad_id = dyad_id;
    slot->role = role;
    sessions_.emplace(id, std::move(slot));
  }
  auto& s = *sp;
  existing = id;
  d.sessions.push_back(&s);
  capture_effects(d, s.state, 0);
  return view(s);
}

SessionView DyadService::step(const std::string& session_id) const {
  auto& slot = session_slot(session_id);
  auto& d = dyad_state(slot.dyad_id);
  std::lock_guard lock(d.mu);
  return view(slot);
}

engine::SessionState DyadService::session(const std::string& session_id) const {
  auto& slot = session_slot(session_id);
  auto& d = dyad_state(slot.dyad_id);
  std::lock_guard lock(d.mu);
  return slot.state;
}

SessionView DyadService::choose(const std::string& session_id, std::size_t index) {
  std::optional<OpTime> op;
  if (!t_op_time) op.emplace(now());
  auto& slot = session_slot(session_id);
  auto& d = dyad_state(slot.dyad_id);
  std::lock_guard lock(d.mu);
  auto next = engine_for(slot.role).advance(slot.state, index);
  if (!replaying_) {
    log_.append({{"type", "choice"},
                 {"ts", engine::iso_timestamp(now())},
                 {"session_id", session_id},
                 {"index", index}});
  }
  auto from = slot.state.transcript.size();
  slot.state = std::move(next);
  capture_effects(d, slot.state, from);
  return view(slot);
}

void DyadService::capture_effects(DyadState& d, const engine::SessionState& s, std::size_t from) {
  for (std::size_t i = from; i < s.transcript.size(); ++i) {
    const auto& e = s.transcript[i];
    if (e.kind != engine::EventKind::effect) continue;
    auto kind = e.payload.value("effect", std::string());
    if (kind == "flag") {
      auto topic = e.payload.value("topic", std::string());
      auto text = e.payload.value("text", std::string());
      if (!flows::is_menu_question(topic, text)) continue;
      add_question(d, {d.record.id, s.audience, topic, text, e.ts});
    } else if (kind == "barrier") {
      auto k = e.payload.value("kind", std::string());
      bool seen = std::any_of(d.barriers.begin(), d.barriers.end(), [&](const auto& b) { return b.kind == k; });
      if (!seen) d.barriers.push_back({d.record.id, k, std::string(flows::barrier_resolution(k))});
    }
  }
}

FlaggedQuestion DyadService::add_question(DyadState& d, FlaggedQuestion q) {
  for (const auto& existing : d.questions)
    if (existing.same_question(q)) return existing;
  d.questions.push_back(q);
  return q;
}

FlaggedQuestion DyadService::flag_question(const std::string& dyad_id, Audience author, const std::string& topic,
                                           const std::string& text) {
  std::optional<OpTime> op;
  if (!t_op_time) op.emplace(now());
  auto& d = dyad_state(dyad_id);
  std::lock_guard lock(d.mu);
  if (author == Audience::both || !arm_permits(d.record.arm, author))
    throw Error(ErrorCode::ArmViolation, std::string(to_string(d.record.arm)) + " arm does not permit " +
                                             std::string(to_string(author)) + " questions");
  const auto& sid = author == Audience::parent ? d.record.parent_session : d.record.adolescent_session;
  if (!sid) throw Error(ErrorCode::PhaseNotReached, "no " + std::string(to_string(author)) + " session in this dyad");
  const auto& s = session_slot(*sid).state;
  const auto& script = engine_for(author).script();
  bool reached = std::any_of(s.transcript.begin(), s.transcript.end(), [&](const auto& e) {
    if (e.kind != engine::EventKind::network_enter) return false;
    auto net = script.find_network(e.payload.value("network", std::string()));
    return net && net->kind == script::NetworkKind::barriers;
  });
  if (!reached) throw Error(ErrorCode::PhaseNotReached, "questions can be flagged once the session reaches visit planning");
  if (!flows::is_menu_question(topic, text))
    throw Error(ErrorCode::InvalidQuestion, "'" + text + "' is not a menu question for topic '" + topic + "'");
  FlaggedQuestion q{dyad_id, author, topic, text, now()};
  bool duplicate = std::any_of(d.questions.begin(), d.questions.end(), [&](const auto& e) { return e.same_question(q); });
  if (duplicate) return add_question(d, q);
  if (!replaying_) {
    log_.append({{"type", "question_flagged"},
                 {"ts", engine::iso_timestamp(now())},
                 {"dyad_id", dyad_id},
                 {"author", to_string(author)},
                 {"topic", topic},
                 {"text", text}});
  }
  return add_question(d, q);
}

std::vector<FlaggedQuestion> DyadService::questions(const std::string& dyad_id) const {
  auto& d = dyad_state(dyad_id);
  std::lock_guard lock(d.mu);
  auto out = d.questions;
  order_questions(out);
  return out;
}

std::vector<BarrierItem> DyadService::barriers(const std::string& dyad_id) const {
  auto& d = dyad_state(dyad_id);
  std::lock_guard lock(d.mu);
  return d.barriers;
}

ClinicReport DyadService::build_report(const DyadState& d) const {
  bool any_finished = std::any_of(d.sessions.begin(), d.sessions.end(), [](const auto* s) { return s->state.finished; });
  if (!any_finished) throw Error(ErrorCode::NoFinishedSession, "dyad " + d.record.id + " has no finished session");
  ClinicReport r;
  r.dyad_id = d.record.id;
  r.sequence = static_cast<std::uint32_t>(d.transmitted.size() + 1);
  r.generated_at = now();
  r.questions.assign(d.questions.begin() + static_cast<std::ptrdiff_t>(d.questions_sent), d.questions.end());
  order_questions(r.questions);
  r.barriers.assign(d.barriers.begin() + static_cast<std::ptrdiff_t>(d.barriers_sent), d.barriers.end());
  for (auto role : {Audience::adolescent, Audience::parent}) {
    const auto& sid = role == Audience::parent ? d.record.parent_session : d.record.adolescent_session;
    if (!sid) continue;
    auto it = std::find_if(d.sessions.begin(), d.sessions.end(), [&](const auto* s) { return s->id == *sid; });
    if (it == d.sessions.end()) continue;
    const auto& s = (*it)->state;
    r.stage_summary.push_back({role, *sid, s.stage(), s.finished});
    if (auto v = s.readiness()) r.readiness.push_back({role, *v});
  }
  return r;
}

ClinicReport DyadService::compile_report(const std::string& dyad_id) {
  std::optional<OpTime> op;
  if (!t_op_time) op.emplace(now());
  auto& d = dyad_state(dyad_id);
  std::lock_guard lock(d.mu);
  return compile_locked(d);
}

ClinicReport DyadService::compile_locked(DyadState& d) {
  if (d.draft && d.in_flight) return *d.draft;
  auto fresh = build_report(d);
  if (d.draft && d.draft->same_content(fresh)) return *d.draft;
  if (!replaying_) {
    nlohmann::json rec{{"type", "report_compiled"},
                       {"ts", engine::iso_timestamp(now())},
                       {"dyad_id", d.record.id},
                       {"sequence", fresh.sequence},
                       {"hash", report_hash(fresh)}};
    rec["report"] = to_json(fresh);
    log_.append(rec);
  }
  d.draft = fresh;
  d.draft_questions = d.questions.size();
  d.draft_barriers = d.barriers.size();
  return fresh;
}

DeliveryReceipt DyadService::transmit_report(const std::string& dyad_id) {
  std::optional<OpTime> op;
  if (!t_op_time) op.emplace(now());
  if (!options_.transport) throw Error(ErrorCode::EndpointMisconfigured, "no clinic endpoint configured");
  auto& d = dyad_state(dyad_id);
  std::lock_guard lock(d.mu);
  if (!d.draft && !d.receipts.empty()) {
    auto fresh = build_report(d);
    if (fresh.questions.empty() && fresh.barriers.empty()) return d.receipts.back();
  }
  const auto report = compile_locked(d);
  try {
    auto receipt = deliver(*options_.transport, report, options_.retry, now(), options_.sleep);
    nlohmann::json rec{{"type", "report_transmitted"},
                       {"ts", engine::iso_timestamp(now())},
                       {"dyad_id", dyad_id},
                       {"sequence", report.sequence}};
    rec["receipt"] = to_json(receipt);
    log_.append(rec);
    d.questions_sent = d.draft_questions;
    d.barriers_sent = d.draft_barriers;
    d.transmitted.push_back(report);
    d.draft.reset();
    d.in_flight = false;
    d.receipts.push_back(receipt);
    return receipt;
  } catch (const DeliveryError& e) {
    d.in_flight = true;
    log_.append({{"type", "delivery_failed"},
                 {"ts", engine::iso_timestamp(now())},
                 {"dyad_id", dyad_id},
                 {"hash", report_hash(report)},
                 {"attempts", e.attempts()},
                 {"error", e.what()}});
    throw;
  }
}

std::vector<ClinicReport> DyadService::reports(const std::string& dyad_id) const {
  auto& d = dyad_state(dyad_id);
  std::lock_guard lock(d.mu);
  auto out = d.transmitted;
  if (d.draft) out.push_back(*d.draft);
  return out;
}

std::vector<DeliveryReceipt> DyadService::receipts(const std::string& dyad_id) const {
  auto& d = dyad_state(dyad_id);
  std::lock_guard lock(d.mu);
  return d.receipts;
}

nlohmann::ordered_json DyadService::snapshot() const {
  nlohmann::ordered_json out;
  out["dyads"] = nlohmann::ordered_json::array();
  for (const auto& rec : dyads()) {
    auto& d = dyad_state(rec.id);
    std::lock_guard lock(d.mu);
    nlohmann::ordered_json j = to_json(d.record);
    j["questions"] = nlohmann::ordered_json::array();
    for (const auto& q : d.questions) j["questions"].push_back(to_json(q));
    j["barriers"] = nlohmann::ordered_json::array();
    for (const auto& b : d.barriers) j["barriers"].push_back(to_json(b));
    j["questions_sent"] = d.questions_sent;
    j["barriers_sent"] = d.barriers_sent;
    j["reports"] = nlohmann::ordered_json::array();
    for (const auto& r : d.transmitted) j["reports"].push_back(to_json(r));
    j["draft"] = d.draft ? nlohmann::ordered_json(to_json(*d.draft)) : nlohmann::ordered_json();
    j["draft_in_flight"] = d.in_flight;
    j["receipts"] = nlohmann::ordered_json::array();
    for (const auto& r : d.receipts) j["receipts"].push_back(to_json(r));
    j["sessions"] = nlohmann::ordered_json::array();
    for (const auto* s : d.sessions) j["sessions"].push_back(nlohmann::ordered_json(engine::to_json(s->state)));
    out["dyads"].push_back(std::move(j));
  }
  return out;
}

}  // namespace clara::dyad
