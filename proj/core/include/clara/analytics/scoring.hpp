#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clara::analytics {

inline constexpr std::size_t kKnowledgeItems = 10;

enum class KnowledgeAnswer { answer_true, answer_false, dont_know };

std::string_view to_string(KnowledgeAnswer a);
/// Accepts true/false/dont_know (also t/f/dk, 1/0).
std::optional<KnowledgeAnswer> parse_knowledge_answer(std::string_view text);

struct KnowledgeScore {
  int count = 0;
  double proportion = 0.0;
};

/// Counts answers matching the key; dont_know never counts.
/// Throws Error(ItemCountMismatch) unless both spans have exactly 10 entries.
KnowledgeScore score_knowledge(std::span<const KnowledgeAnswer> answers, std::span<const bool> key);

struct LikertItem {
  std::string id;
  int value = 0;
  int lo = 1;
  int hi = 5;
};

struct LikertScore {
  std::vector<std::pair<std::string, int>> items;  // after reverse scoring
  double mean = 0.0;
};

/// lo + hi - v. Throws Error(OutOfRange).
int reverse_score(int value, int lo, int hi);

/// Throws Error(OutOfRange) for a value outside its bounds or inverted bounds,
/// Error(InvalidArgument) for an empty item list.
LikertScore score_likert(const std::vector<LikertItem>& items, const std::set<std::string>& reverse = {});

/// Arithmetic midpoint of a scale, used as the neutral value.
inline double scale_midpoint(int lo, int hi) { return (lo + hi) / 2.0; }

}  // namespace clara::analytics
