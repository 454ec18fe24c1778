#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clara/domain.hpp"
#include "clara/engine/session.hpp"

namespace clara::dyad {

inline constexpr std::string_view kReportSchema = "clara.clinic_report/1";

struct FlaggedQuestion {
  std::string dyad_id;
  Audience author = Audience::parent;
  std::string topic;
  std::string text;
  engine::Clock::time_point created_at;

  /// Deduplication identity.
  bool same_question(const FlaggedQuestion& o) const {
    return dyad_id == o.dyad_id && author == o.author && topic == o.topic && text == o.text;
  }
  bool operator==(const FlaggedQuestion&) const = default;
};

struct BarrierItem {
  std::string dyad_id;
  std::string kind;
  std::string resolution;

  bool operator==(const BarrierItem&) const = default;
};

struct MemberSummary {
  Audience member = Audience::parent;
  std::string session_id;
  std::optional<StageOfChange> stage;
  bool finished = false;

  bool operator==(const MemberSummary&) const = default;
};

struct ReadinessValue {
  Audience member = Audience::parent;
  std::int64_t value = 0;

  bool operator==(const ReadinessValue&) const = default;
};

/// Document sent to clinic staff before the visit. `sequence` 1 is the initial
/// report; later sequences are follow-ups carrying only items flagged after
/// the previous transmission.
struct ClinicReport {
  std::string dyad_id;
  std::uint32_t sequence = 1;
  engine::Clock::time_point generated_at;
  std::vector<FlaggedQuestion> questions;
  std::vector<BarrierItem> barriers;
  std::vector<MemberSummary> stage_summary;
  std::vector<ReadinessValue> readiness;

  bool operator==(const ClinicReport&) const = default;
  /// Equality ignoring generated_at.
  bool same_content(const ClinicReport& o) const;
};

/// Adolescent-authored questions first, each group in flag order.
void order_questions(std::vector<FlaggedQuestion>& questions);

nlohmann::ordered_json to_json(const FlaggedQuestion& q);
nlohmann::ordered_json to_json(const BarrierItem& b);
nlohmann::ordered_json to_json(const ClinicReport& r);
/// Throws Error(InvalidRecord).
ClinicReport report_from_json(const nlohmann::json& j);
FlaggedQuestion question_from_json(const nlohmann::json& j);

/// Sorted-key compact JSON of the report without generated_at.
std::string canonical_bytes(const ClinicReport& r);
/// Lowercase hex SHA-256 of canonical_bytes.
std::string report_hash(const ClinicReport& r);
/// `<dyad id>:<report hash>`.
std::string idempotency_key(const ClinicReport& r);

}  // namespace clara::dyad
