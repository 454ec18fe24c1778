#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace clara {

enum class Audience { parent, adolescent, both };

/// Transtheoretical-model readiness stages, ordered by readiness.
enum class StageOfChange { Precontemplation, Contemplation, Preparation, Action, Maintenance };

inline constexpr std::array kAllStages = {
    StageOfChange::Precontemplation, StageOfChange::Contemplation, StageOfChange::Preparation,
    StageOfChange::Action, StageOfChange::Maintenance};

/// Study arm of a dyad. CHILD means both members have app access.
enum class Arm { CONTROL, PARENT, CHILD };

inline constexpr std::array kAllArms = {Arm::CONTROL, Arm::PARENT, Arm::CHILD};

std::string_view to_string(Audience a);
std::string_view to_string(StageOfChange s);
std::string_view to_string(Arm a);

std::optional<Audience> parse_audience(std::string_view text);
std::optional<StageOfChange> parse_stage(std::string_view text);
std::optional<Arm> parse_arm(std::string_view text);

/// True when a script written for `script_audience` may be run by `user`.
bool audience_compatible(Audience script_audience, Audience user);

}  // namespace clara
