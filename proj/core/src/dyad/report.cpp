#include "clara/dyad/report.hpp"

#include <algorithm>

#include "../text_util.hpp"
#include "clara/error.hpp"

namespace clara::dyad {

namespace {

Audience member_from(const nlohmann::json& j, const char* key) {
  auto a = parse_audience(j.at(key).get<std::string>());
  if (!a || *a == Audience::both) throw Error(ErrorCode::InvalidRecord, std::string("invalid ") + key);
  return *a;
}

}  // namespace

bool ClinicReport::same_content(const ClinicReport& o) const {
  auto a = *this;
  a.generated_at = o.generated_at;
  return a == o;
}

void order_questions(std::vector<FlaggedQuestion>& qs) {
  std::stable_partition(qs.begin(), qs.end(), [](const auto& q) { return q.author == Audience::adolescent; });
}

nlohmann::ordered_json to_json(const FlaggedQuestion& q) {
  nlohmann::ordered_json j;
  j["author"] = to_string(q.author);
  j["topic"] = q.topic;
  j["text"] = q.text;
  j["created_at"] = engine::iso_timestamp(q.created_at);
  return j;
}

nlohmann::ordered_json to_json(const BarrierItem& b) {
  nlohmann::ordered_json j;
  j["kind"] = b.kind;
  j["resolution"] = b.resolution;
  return j;
}

nlohmann::ordered_json to_json(const ClinicReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = kReportSchema;
  j["dyad_id"] = r.dyad_id;
  j["sequence"] = r.sequence;
  j["generated_at"] = engine::iso_timestamp(r.generated_at);
  j["questions"] = nlohmann::ordered_json::array();
  for (const auto& q : r.questions) j["questions"].push_back(to_json(q));
  j["barriers"] = nlohmann::ordered_json::array();
  for (const auto& b : r.barriers) j["barriers"].push_back(to_json(b));
  j["stage_summary"] = nlohmann::ordered_json::array();
  for (const auto& m : r.stage_summary) {
    nlohmann::ordered_json e;
    e["member"] = to_string(m.member);
    e["session_id"] = m.session_id;
    e["stage"] = m.stage ? nlohmann::ordered_json(to_string(*m.stage)) : nlohmann::ordered_json();
    e["finished"] = m.finished;
    j["stage_summary"].push_back(std::move(e));
  }
  j["readiness"] = nlohmann::ordered_json::array();
  for (const auto& v : r.readiness) j["readiness"].push_back({{"member", to_string(v.member)}, {"value", v.value}});
  return j;
}

FlaggedQuestion question_from_json(const nlohmann::json& j) {
  try {
    FlaggedQuestion q;
    q.dyad_id = j.value("dyad_id", std::string());
    q.author = member_from(j, "author");
    q.topic = j.at("topic").get<std::string>();
    q.text = j.at("text").get<std::string>();
    q.created_at = engine::parse_iso_timestamp(j.at("created_at").get<std::string>());
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidRecord, std::string("malformed question: ") + e.what());
  }
}

ClinicReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<std::string>() != kReportSchema)
      throw Error(ErrorCode::InvalidRecord, "unsupported report schema");
    ClinicReport r;
    r.dyad_id = j.at("dyad_id").get<std::string>();
    r.sequence = j.at("sequence").get<std::uint32_t>();
    r.generated_at = engine::parse_iso_timestamp(j.at("generated_at").get<std::string>());
    for (const auto& q : j.at("questions")) {
      auto fq = question_from_json(q);
      fq.dyad_id = r.dyad_id;
      r.questions.push_back(std::move(fq));
    }
    for (const auto& b : j.at("barriers"))
      r.barriers.push_back({r.dyad_id, b.at("kind").get<std::string>(), b.at("resolution").get<std::string>()});
    for (const auto& m : j.at("stage_summary")) {
      MemberSummary s;
      s.member = member_from(m, "member");
      s.session_id = m.at("session_id").get<std::string>();
      if (!m.at("stage").is_null()) {
        s.stage = parse_stage(m.at("stage").get<std::string>());
        if (!s.stage) throw Error(ErrorCode::InvalidRecord, "invalid stage");
      }
      s.finished = m.at("finished").get<bool>();
      r.stage_summary.push_back(std::move(s));
    }
    for (const auto& v : j.at("readiness")) r.readiness.push_back({member_from(v, "member"), v.at("value").get<std::int64_t>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidRecord, std::string("malformed report: ") + e.what());
  }
}

std::string canonical_bytes(const ClinicReport& r) {
  nlohmann::json j = to_json(r);
  j.erase("generated_at");
  return j.dump();
}

std::string report_hash(const ClinicReport& r) { return detail::sha256_hex(canonical_bytes(r)); }

std::string idempotency_key(const ClinicReport& r) { return r.dyad_id + ":" + report_hash(r); }

}  // namespace clara::dyad
