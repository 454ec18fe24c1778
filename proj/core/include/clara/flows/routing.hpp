#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clara/domain.hpp"
#include "clara/engine/session.hpp"
#include "clara/script/script.hpp"

namespace clara::flows {

enum class PhaseBody { education, game, mi };

enum class CoachingVariant {
  parent_ready_informational,
  parent_hesitant_exploratory,
  adolescent_ready_express,
  adolescent_unsure_voice,
};

std::string_view to_string(PhaseBody b);
std::string_view to_string(CoachingVariant v);
std::optional<PhaseBody> parse_phase_body(std::string_view text);
std::optional<CoachingVariant> parse_coaching_variant(std::string_view text);

/// Intent 1-2 Precontemplation, 3 Contemplation, 4-5 Preparation; two doses means Maintenance.
/// Throws Error(OutOfRange) for intent outside 1..5 or doses outside 0..2.
StageOfChange classify_stage(int intent_response, int vaccinated_doses);

PhaseBody select_phase_body(Audience audience, StageOfChange stage, bool game_opt_in);

CoachingVariant select_coaching(Audience audience, StageOfChange stage);

/// Ordered phases for an audience; alternatives of one phase are joined with '|'.
std::vector<std::string> phase_plan(Audience audience);

/// Guard functions for the shipped bundles:
///   stage_of(intent, doses)          -> stage symbol
///   phase_body(audience, stage, opt) -> education | game | mi
///   coaching_for(audience, stage)    -> coaching variant symbol
/// Unset arguments yield an unset result, so comparisons against it are false.
script::FunctionTable builtin_functions();

struct ComprehensionCheck {
  std::string question;
  std::vector<std::string> options;
  std::size_t correct = 0;
  std::string content_tag;
  script::StateRef reteach;  // one-shot re-teach state for the tag

  bool operator==(const ComprehensionCheck&) const = default;
};

enum class GradeKind { correct, incorrect_with_reteach, unmastered };

struct GradeResult {
  GradeKind kind = GradeKind::correct;
  std::optional<script::StateRef> reteach;

  bool operator==(const GradeResult&) const = default;
};

/// First miss routes to the re-teach state; a miss on the re-ask (prior_misses >= 1)
/// moves on with the fact unmastered. Throws Error(InvalidChoiceIndex).
GradeResult grade_comprehension(const ComprehensionCheck& check, std::size_t answer, unsigned prior_misses = 0);

/// Comprehension checks authored in a script: states whose choices either master a tag
/// or send it to re-teaching.
std::vector<ComprehensionCheck> extract_checks(const script::DialogueScript& script);

enum class Concern { safety, side_effects, necessity, age, other };

std::string_view to_string(Concern c);
std::optional<Concern> parse_concern(std::string_view text);

struct MIState {
  std::optional<Concern> concern;
  bool validation_delivered = false;
  std::optional<std::string> change_talk;
  std::optional<std::int64_t> readiness;

  bool operator==(const MIState&) const = default;
};

/// Reads the MI variables (concern, validated, change_talk, readiness) of a session.
MIState mi_state(const engine::SessionState& session);

/// Curated clinic questions per topic; flags must use one of these texts.
const std::map<std::string, std::vector<std::string>>& question_menu();
bool is_menu_question(std::string_view topic, std::string_view text);

/// Resolution text shown for a barrier kind; empty for unknown kinds.
std::string_view barrier_resolution(std::string_view kind);

}  // namespace clara::flows
