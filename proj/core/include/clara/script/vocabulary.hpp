#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string_view>

namespace clara::script {

// Closed vocabularies shared by scripts, the engine and the dyad service.

inline constexpr std::array<std::string_view, 4> kQuestionTopics = {"safety", "efficacy", "recommendations",
                                                                    "other"};
inline constexpr std::array<std::string_view, 3> kBarrierKinds = {"transportation", "cost", "scheduling"};
inline constexpr std::array<std::string_view, 5> kCharacterRoles = {"Adventurer", "Scientist", "Mage", "Warrior",
                                                                    "Healer"};

inline constexpr std::string_view kStageVariable = "stage";
inline constexpr std::string_view kReadinessVariable = "readiness";
inline constexpr std::string_view kPermissionVariable = "permission";
inline constexpr std::int64_t kRulerMin = 1;
inline constexpr std::int64_t kRulerMax = 10;

inline bool is_question_topic(std::string_view s) {
  return std::find(kQuestionTopics.begin(), kQuestionTopics.end(), s) != kQuestionTopics.end();
}
inline bool is_barrier_kind(std::string_view s) {
  return std::find(kBarrierKinds.begin(), kBarrierKinds.end(), s) != kBarrierKinds.end();
}
inline bool is_character_role(std::string_view s) {
  return std::find(kCharacterRoles.begin(), kCharacterRoles.end(), s) != kCharacterRoles.end();
}

}  // namespace clara::script
