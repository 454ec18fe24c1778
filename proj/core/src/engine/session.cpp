#include "clara/engine/session.hpp"

#include <cstdio>
#include <ctime>

#include "clara/error.hpp"
#include "clara/script/vocabulary.hpp"

namespace clara::engine {

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::utterance: return "utterance";
    case EventKind::choice_presented: return "choice_presented";
    case EventKind::choice_taken: return "choice_taken";
    case EventKind::effect: return "effect";
    case EventKind::network_enter: return "network_enter";
    case EventKind::network_exit: return "network_exit";
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (auto k : {EventKind::utterance, EventKind::choice_presented, EventKind::choice_taken, EventKind::effect,
                 EventKind::network_enter, EventKind::network_exit})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

std::string_view to_string(FactStatus s) {
  switch (s) {
    case FactStatus::presented: return "presented";
    case FactStatus::mastered: return "mastered";
    case FactStatus::unmastered: return "unmastered";
  }
  return "?";
}

namespace {

std::optional<FactStatus> parse_fact_status(std::string_view text) {
  for (auto s : {FactStatus::presented, FactStatus::mastered, FactStatus::unmastered})
    if (to_string(s) == text) return s;
  return std::nullopt;
}

}  // namespace

bool SessionState::equivalent(const SessionState& o) const {
  if (transcript.size() != o.transcript.size()) return false;
  for (std::size_t i = 0; i < transcript.size(); ++i)
    if (!transcript[i].same_content(o.transcript[i])) return false;
  return session_id == o.session_id && script_id == o.script_id && script_version == o.script_version &&
         audience == o.audience && bindings == o.bindings && variables == o.variables &&
         call_stack == o.call_stack && current == o.current && finished == o.finished && rng_seed == o.rng_seed &&
         pending == o.pending && presented == o.presented && game == o.game && facts == o.facts &&
         warnings == o.warnings;
}

std::optional<StageOfChange> SessionState::stage() const {
  auto it = variables.find(std::string(script::kStageVariable));
  if (it == variables.end()) return std::nullopt;
  if (auto s = std::get_if<std::string>(&it->second)) return parse_stage(*s);
  return std::nullopt;
}

std::optional<std::int64_t> SessionState::readiness() const {
  auto it = variables.find(std::string(script::kReadinessVariable));
  if (it == variables.end()) return std::nullopt;
  if (auto i = std::get_if<std::int64_t>(&it->second)) return *i;
  return std::nullopt;
}

nlohmann::json to_json(const script::Value& v) {
  if (auto b = std::get_if<bool>(&v)) return *b;
  if (auto i = std::get_if<std::int64_t>(&v)) return *i;
  if (auto s = std::get_if<std::string>(&v)) return *s;
  return nullptr;
}

script::Value value_from_json(const nlohmann::json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_null()) return script::Value{};
  throw Error(ErrorCode::TypeError, "unsupported variable value " + j.dump());
}

std::string iso_timestamp(Clock::time_point tp) {
  using namespace std::chrono;
  auto ms = duration_cast<milliseconds>(tp.time_since_epoch()).count();
  auto secs = static_cast<std::time_t>(ms / 1000);
  auto rem = ms % 1000;
  if (rem < 0) {
    rem += 1000;
    --secs;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(rem));
  return buf;
}

Clock::time_point parse_iso_timestamp(std::string_view text) {
  std::tm tm{};
  int ms = 0;
  std::string s(text);
  int n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                      &tm.tm_min, &tm.tm_sec, &ms);
  if (n < 6) throw Error(ErrorCode::InvalidArgument, "bad timestamp '" + s + "'");
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  auto secs = timegm(&tm);
  return Clock::time_point(std::chrono::seconds(secs)) + std::chrono::milliseconds(ms);
}

nlohmann::ordered_json to_json(const TranscriptEvent& e, bool with_timestamp) {
  nlohmann::ordered_json j;
  j["seq"] = e.seq;
  j["kind"] = to_string(e.kind);
  j["payload"] = e.payload;
  if (with_timestamp) j["ts"] = iso_timestamp(e.ts);
  return j;
}

std::string transcript_jsonl(const std::vector<TranscriptEvent>& events, bool with_timestamps) {
  std::string out;
  for (const auto& e : events) {
    out += to_json(e, with_timestamps).dump();
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const SessionState& s) {
  nlohmann::json j;
  j["session_id"] = s.session_id;
  j["script_id"] = s.script_id;
  j["script_version"] = s.script_version;
  j["audience"] = to_string(s.audience);
  j["bindings"] = s.bindings;
  auto& vars = j["variables"] = nlohmann::json::object();
  for (const auto& [k, v] : s.variables) vars[k] = to_json(v);
  auto& stack = j["call_stack"] = nlohmann::json::array();
  for (const auto& f : s.call_stack) stack.push_back({{"network", f.network}, {"return", f.return_state}});
  j["current"] = {{"network", s.current.network}, {"state", s.current.state}};
  auto& tr = j["transcript"] = nlohmann::json::array();
  for (const auto& e : s.transcript) {
    tr.push_back({{"seq", e.seq},
                  {"kind", to_string(e.kind)},
                  {"payload", e.payload.dump()},
                  {"ts_ns", std::chrono::duration_cast<std::chrono::nanoseconds>(e.ts.time_since_epoch()).count()}});
  }
  j["finished"] = s.finished;
  j["rng_seed"] = s.rng_seed;
  auto& pending = j["pending"] = nlohmann::json::array();
  for (const auto& u : s.pending)
    pending.push_back({{"text", u.text},
                       {"tags", u.content_tags},
                       {"emphasis", u.emphasis},
                       {"role", nvb::to_string(u.role)}});
  j["presented"] = s.presented;
  if (s.game) {
    j["game"] = {{"role", game::to_string(s.game->role)},
                 {"unlocked", s.game->unlocked},
                 {"solved", s.game->solved},
                 {"attempts", s.game->attempts}};
  } else {
    j["game"] = nullptr;
  }
  auto& facts = j["facts"] = nlohmann::json::object();
  for (const auto& [k, v] : s.facts) facts[k] = to_string(v);
  j["warnings"] = s.warnings;
  return j;
}

SessionState session_from_json(const nlohmann::json& j) {
  try {
    SessionState s;
    s.session_id = j.at("session_id").get<std::string>();
    s.script_id = j.at("script_id").get<std::string>();
    s.script_version = j.at("script_version").get<std::string>();
    auto aud = parse_audience(j.at("audience").get<std::string>());
    if (!aud) throw Error(ErrorCode::InvalidRecord, "bad audience in snapshot");
    s.audience = *aud;
    s.bindings = j.at("bindings").get<std::map<std::string, std::string>>();
    for (const auto& [k, v] : j.at("variables").items()) s.variables[k] = value_from_json(v);
    for (const auto& f : j.at("call_stack"))
      s.call_stack.push_back({f.at("network").get<std::string>(), f.at("return").get<std::string>()});
    s.current = {j.at("current").at("network").get<std::string>(), j.at("current").at("state").get<std::string>()};
    for (const auto& e : j.at("transcript")) {
      TranscriptEvent ev;
      ev.seq = e.at("seq").get<std::uint64_t>();
      auto kind = parse_event_kind(e.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::InvalidRecord, "bad event kind in snapshot");
      ev.kind = *kind;
      // stored as text so the payload keeps its key order
      ev.payload = nlohmann::ordered_json::parse(e.at("payload").get<std::string>());
      ev.ts = Clock::time_point(std::chrono::duration_cast<Clock::duration>(
          std::chrono::nanoseconds(e.at("ts_ns").get<std::int64_t>())));
      s.transcript.push_back(std::move(ev));
    }
    s.finished = j.at("finished").get<bool>();
    s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    for (const auto& u : j.at("pending")) {
      PendingUtterance p;
      p.text = u.at("text").get<std::string>();
      p.content_tags = u.at("tags").get<std::vector<std::string>>();
      p.emphasis = u.at("emphasis").get<std::vector<std::size_t>>();
      auto role = nvb::parse_discourse_role(u.at("role").get<std::string>());
      if (!role) throw Error(ErrorCode::InvalidRecord, "bad discourse role in snapshot");
      p.role = *role;
      s.pending.push_back(std::move(p));
    }
    s.presented = j.at("presented").get<std::vector<std::size_t>>();
    if (!j.at("game").is_null()) {
      const auto& g = j.at("game");
      game::GameProgress p;
      auto role = game::parse_role(g.at("role").get<std::string>());
      if (!role) throw Error(ErrorCode::InvalidRecord, "bad role in snapshot");
      p.role = *role;
      p.unlocked = g.at("unlocked").get<std::set<std::string>>();
      p.solved = g.at("solved").get<std::set<std::string>>();
      p.attempts = g.at("attempts").get<std::map<std::string, std::uint32_t>>();
      s.game = std::move(p);
    }
    for (const auto& [k, v] : j.at("facts").items()) {
      auto st = parse_fact_status(v.get<std::string>());
      if (!st) throw Error(ErrorCode::InvalidRecord, "bad fact status in snapshot");
      s.facts[k] = *st;
    }
    s.warnings = j.at("warnings").get<std::vector<std::string>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidRecord, std::string("malformed session snapshot: ") + e.what());
  }
}

nlohmann::ordered_json to_json(const RenderStep& step) {
  nlohmann::ordered_json j;
  j["progress"] = step.progress;
  auto& utts = j["utterances"] = nlohmann::ordered_json::array();
  for (const auto& u : step.utterances) {
    nlohmann::ordered_json uj;
    uj["text"] = u.text;
    uj["tags"] = u.content_tags;
    auto& b = uj["behaviors"] = nlohmann::ordered_json::array();
    for (const auto& t : u.behaviors) b.push_back({nvb::to_string(t.kind), t.start, t.end});
    utts.push_back(std::move(uj));
  }
  auto& choices = j["choices"] = nlohmann::ordered_json::array();
  for (const auto& c : step.choices) {
    nlohmann::ordered_json cj;
    cj["index"] = c.index;
    cj["label"] = c.label;
    choices.push_back(std::move(cj));
  }
  if (step.riddle) {
    nlohmann::ordered_json r;
    r["area"] = step.riddle->area;
    r["guardian"] = step.riddle->guardian;
    r["prompt"] = step.riddle->prompt;
    r["hint"] = step.riddle->hint ? nlohmann::ordered_json(*step.riddle->hint) : nlohmann::ordered_json(nullptr);
    r["unlocked"] = step.riddle->unlocked;
    r["role"] = step.riddle->role;
    j["riddle"] = std::move(r);
  } else {
    j["riddle"] = nullptr;
  }
  return j;
}

}  // namespace clara::engine
