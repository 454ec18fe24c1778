#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "clara/analytics/stats.hpp"
#include "clara/domain.hpp"

namespace clara::analytics {

enum class Wave { pre, post };
enum class Respondent { parent, child };
enum class Measure { knowledge, attitude, intent };

inline constexpr std::array kAllMeasures = {Measure::knowledge, Measure::attitude, Measure::intent};
inline constexpr std::array kAllRespondents = {Respondent::parent, Respondent::child};

std::string_view to_string(Wave w);
std::string_view to_string(Respondent r);
std::string_view to_string(Measure m);
std::optional<Wave> parse_wave(std::string_view s);
std::optional<Respondent> parse_respondent(std::string_view s);

/// One row of a record file: participant,wave,instrument,item,value.
struct Record {
  std::string participant;
  Wave wave = Wave::pre;
  std::string instrument;
  std::string item;
  std::string value;
  std::size_t line = 0;
};

/// Header line required. Throws Error(InvalidRecord) with the line number.
std::vector<Record> parse_records_csv(std::string_view text);
std::string records_csv(const std::vector<Record>& records);

struct ArmAssignment {
  std::string participant;
  std::string dyad;
  Arm arm = Arm::CONTROL;
  Respondent respondent = Respondent::parent;
};

/// participant,dyad,arm,respondent. Throws Error(InvalidRecord).
std::map<std::string, ArmAssignment> parse_arms_csv(std::string_view text);
std::string arms_csv(const std::map<std::string, ArmAssignment>& arms);

struct ItemSpec {
  std::string instrument;
  std::string item;
  int lo = 1;
  int hi = 5;
  bool reverse = false;
};

/// Knowledge items and key, plus bounds and keying of every Likert item.
/// Instruments named "attitude" and "intent" feed the measures of the same
/// name; any other Likert instrument is a post-visit rating instrument.
struct InstrumentSet {
  std::vector<std::string> knowledge_items;
  std::vector<bool> knowledge_key;
  std::vector<ItemSpec> likert;

  const ItemSpec* find(std::string_view instrument, std::string_view item) const;
};

/// Knowledge items from (tag, truth) pairs; attitude a1..a7 on 1-5; intent i1 on 1-5.
InstrumentSet default_instruments(const std::vector<std::pair<std::string, bool>>& knowledge_key);

/// instrument,item,lo,hi,reverse,key. Knowledge rows leave lo/hi/reverse empty and
/// set key to true/false. Throws Error(InvalidRecord).
InstrumentSet parse_instruments_csv(std::string_view text);

struct ParticipantScores {
  std::optional<double> knowledge;  // 0-10 count
  std::optional<double> attitude;   // instrument mean
  std::optional<double> intent;

  std::optional<double> get(Measure m) const;
  void set(Measure m, double v);
};

struct Exclusion {
  std::string participant;
  std::optional<Measure> measure;
  std::string reason;
};

/// Scores every participant of one wave. Items that fail validation exclude
/// that participant's measure and are reported, never thrown.
std::map<std::string, ParticipantScores> score_wave(const std::vector<Record>& records, Wave wave,
                                                    const InstrumentSet& instruments,
                                                    std::vector<Exclusion>* exclusions = nullptr);

struct DeltaOutcome {
  Measure measure = Measure::knowledge;
  Arm arm = Arm::CONTROL;
  Respondent respondent = Respondent::parent;
  std::optional<DescriptiveStats> delta;  // empty group: no participants with both waves
  std::vector<std::string> participants;
};

struct DeltaReport {
  /// One entry per (measure, arm, respondent) in table order.
  std::vector<DeltaOutcome> outcomes;
  std::vector<Exclusion> exclusions;

  const DeltaOutcome& at(Measure m, Arm a, Respondent r) const;
};

/// Per-participant post - pre grouped by (measure, arm, respondent).
DeltaReport compute_deltas(const std::map<std::string, ParticipantScores>& pre,
                           const std::map<std::string, ParticipantScores>& post,
                           const std::map<std::string, ArmAssignment>& arms);

DeltaReport compute_deltas(const std::vector<Record>& pre, const std::vector<Record>& post,
                           const std::map<std::string, ArmAssignment>& arms, const InstrumentSet& instruments);

}  // namespace clara::analytics
