#include "clara/domain.hpp"

namespace clara {

std::string_view to_string(Audience a) {
  switch (a) {
    case Audience::parent: return "parent";
    case Audience::adolescent: return "adolescent";
    case Audience::both: return "both";
  }
  return "?";
}

std::string_view to_string(StageOfChange s) {
  switch (s) {
    case StageOfChange::Precontemplation: return "Precontemplation";
    case StageOfChange::Contemplation: return "Contemplation";
    case StageOfChange::Preparation: return "Preparation";
    case StageOfChange::Action: return "Action";
    case StageOfChange::Maintenance: return "Maintenance";
  }
  return "?";
}

std::string_view to_string(Arm a) {
  switch (a) {
    case Arm::CONTROL: return "CONTROL";
    case Arm::PARENT: return "PARENT";
    case Arm::CHILD: return "CHILD";
  }
  return "?";
}

std::optional<Audience> parse_audience(std::string_view text) {
  for (auto a : {Audience::parent, Audience::adolescent, Audience::both})
    if (to_string(a) == text) return a;
  return std::nullopt;
}

std::optional<StageOfChange> parse_stage(std::string_view text) {
  for (auto s : kAllStages)
    if (to_string(s) == text) return s;
  return std::nullopt;
}

std::optional<Arm> parse_arm(std::string_view text) {
  for (auto a : kAllArms)
    if (to_string(a) == text) return a;
  // the study protocol also calls the both-members arm DYAD
  if (text == "DYAD") return Arm::CHILD;
  return std::nullopt;
}

bool audience_compatible(Audience script_audience, Audience user) {
  if (user == Audience::both) return script_audience == Audience::both;
  return script_audience == Audience::both || script_audience == user;
}

}  // namespace clara
