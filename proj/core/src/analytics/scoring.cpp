#include "clara/analytics/scoring.hpp"

#include "clara/error.hpp"

namespace clara::analytics {

std::string_view to_string(KnowledgeAnswer a) {
  switch (a) {
    case KnowledgeAnswer::answer_true:
      return "true";
    case KnowledgeAnswer::answer_false:
      return "false";
    case KnowledgeAnswer::dont_know:
      return "dont_know";
  }
  return "?";
}

std::optional<KnowledgeAnswer> parse_knowledge_answer(std::string_view t) {
  if (t == "true" || t == "t" || t == "1") return KnowledgeAnswer::answer_true;
  if (t == "false" || t == "f" || t == "0") return KnowledgeAnswer::answer_false;
  if (t == "dont_know" || t == "dk") return KnowledgeAnswer::dont_know;
  return std::nullopt;
}

KnowledgeScore score_knowledge(std::span<const KnowledgeAnswer> answers, std::span<const bool> key) {
  if (answers.size() != kKnowledgeItems || key.size() != kKnowledgeItems)
    throw Error(ErrorCode::ItemCountMismatch, "knowledge scoring needs exactly 10 answers and 10 key entries, got " +
                                                  std::to_string(answers.size()) + " and " + std::to_string(key.size()));
  KnowledgeScore s;
  for (std::size_t i = 0; i < kKnowledgeItems; ++i) {
    if (answers[i] == KnowledgeAnswer::dont_know) continue;
    if ((answers[i] == KnowledgeAnswer::answer_true) == key[i]) ++s.count;
  }
  s.proportion = s.count / static_cast<double>(kKnowledgeItems);
  return s;
}

int reverse_score(int value, int lo, int hi) {
  if (lo >= hi) throw Error(ErrorCode::OutOfRange, "scale bounds must satisfy lo < hi");
  if (value < lo || value > hi)
    throw Error(ErrorCode::OutOfRange, "value " + std::to_string(value) + " outside " + std::to_string(lo) + ".." +
                                           std::to_string(hi));
  return lo + hi - value;
}

LikertScore score_likert(const std::vector<LikertItem>& items, const std::set<std::string>& reverse) {
  if (items.empty()) throw Error(ErrorCode::InvalidArgument, "no Likert items to score");
  LikertScore s;
  double sum = 0.0;
  for (const auto& it : items) {
    if (it.lo >= it.hi) throw Error(ErrorCode::OutOfRange, "item '" + it.id + "' has inverted bounds");
    if (it.value < it.lo || it.value > it.hi)
      throw Error(ErrorCode::OutOfRange, "item '" + it.id + "' value " + std::to_string(it.value) + " outside " +
                                             std::to_string(it.lo) + ".." + std::to_string(it.hi));
    int v = reverse.count(it.id) ? reverse_score(it.value, it.lo, it.hi) : it.value;
    s.items.emplace_back(it.id, v);
    sum += v;
  }
  s.mean = sum / static_cast<double>(items.size());
  return s;
}

}  // namespace clara::analytics
