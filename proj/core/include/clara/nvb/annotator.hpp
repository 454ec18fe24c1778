#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clara::nvb {

/// Author-supplied discourse function of an utterance; drives the rule table.
enum class DiscourseRole { greeting, new_information, contrast, affirmation, question };

enum class BehaviorKind { beat_gesture, gaze_away, gaze_toward, eyebrow_raise, head_nod, smile };

/// A nonverbal behavior aligned to an inclusive word span of one utterance.
struct BehaviorTag {
  BehaviorKind kind;
  std::size_t start;
  std::size_t end;

  bool operator==(const BehaviorTag&) const = default;
};

/// Utterances longer than this open with a gaze-away (turn-taking convention).
inline constexpr std::size_t kGazeAwayWordThreshold = 12;

std::string_view to_string(DiscourseRole role);
std::string_view to_string(BehaviorKind kind);
std::optional<DiscourseRole> parse_discourse_role(std::string_view text);

/// Whitespace-delimited words; punctuation stays attached to its word.
std::vector<std::string_view> split_words(std::string_view text);

/// Annotates `text` with behavior tags. Deterministic and pure.
/// Emphasis hints outside the utterance are ignored.
/// Throws clara::Error(EmptyText) when `text` has no words.
std::vector<BehaviorTag> annotate(std::string_view text, std::span<const std::size_t> emphasis,
                                  DiscourseRole role);

}  // namespace clara::nvb
