#include "clara/nvb/annotator.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "clara/error.hpp"

namespace clara::nvb {
namespace {

// Function words never carry a default beat.
constexpr std::array<std::string_view, 40> kStopwords = {
    "a",    "an",   "the",  "and",  "or",   "but",  "of",   "to",   "in",    "on",
    "at",   "for",  "with", "is",   "are",  "was",  "be",   "it",   "its",   "this",
    "that", "i",    "you",  "we",   "they", "he",   "she",  "my",   "your",  "our",
    "so",   "as",   "if",   "do",   "does", "can",  "will", "just", "there", "about"};

constexpr std::array<std::string_view, 8> kContrastMarkers = {
    "but", "however", "although", "though", "yet", "whereas", "while", "instead"};

std::string normalize(std::string_view word) {
  std::string out;
  for (char c : word) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc)) out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& words, const std::string& w) {
  return std::find(words.begin(), words.end(), w) != words.end();
}

std::size_t first_content_word(const std::vector<std::string_view>& words) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto w = normalize(words[i]);
    if (!w.empty() && !contains(kStopwords, w)) return i;
  }
  return 0;
}

}  // namespace

std::string_view to_string(DiscourseRole role) {
  switch (role) {
    case DiscourseRole::greeting: return "greeting";
    case DiscourseRole::new_information: return "new_information";
    case DiscourseRole::contrast: return "contrast";
    case DiscourseRole::affirmation: return "affirmation";
    case DiscourseRole::question: return "question";
  }
  return "?";
}

std::string_view to_string(BehaviorKind kind) {
  switch (kind) {
    case BehaviorKind::beat_gesture: return "beat_gesture";
    case BehaviorKind::gaze_away: return "gaze_away";
    case BehaviorKind::gaze_toward: return "gaze_toward";
    case BehaviorKind::eyebrow_raise: return "eyebrow_raise";
    case BehaviorKind::head_nod: return "head_nod";
    case BehaviorKind::smile: return "smile";
  }
  return "?";
}

std::optional<DiscourseRole> parse_discourse_role(std::string_view text) {
  for (auto r : {DiscourseRole::greeting, DiscourseRole::new_information, DiscourseRole::contrast,
                 DiscourseRole::affirmation, DiscourseRole::question})
    if (to_string(r) == text) return r;
  return std::nullopt;
}

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.push_back(text.substr(start, i - start));
  }
  return words;
}

std::vector<BehaviorTag> annotate(std::string_view text, std::span<const std::size_t> emphasis,
                                  DiscourseRole role) {
  const auto words = split_words(text);
  if (words.empty()) throw Error(ErrorCode::EmptyText, "cannot annotate an empty utterance");
  const std::size_t last = words.size() - 1;

  std::vector<std::size_t> hints;
  for (std::size_t h : emphasis)
    if (h <= last) hints.push_back(h);
  std::sort(hints.begin(), hints.end());
  hints.erase(std::unique(hints.begin(), hints.end()), hints.end());

  std::vector<BehaviorTag> tags;
  switch (role) {
    case DiscourseRole::greeting:
      tags.push_back({BehaviorKind::smile, 0, last});
      tags.push_back({BehaviorKind::gaze_toward, 0, last});
      break;
    case DiscourseRole::new_information:
      if (hints.empty()) hints.push_back(first_content_word(words));
      for (std::size_t h : hints) tags.push_back({BehaviorKind::beat_gesture, h, h});
      break;
    case DiscourseRole::contrast: {
      std::size_t at = hints.empty() ? 0 : hints.front();
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (contains(kContrastMarkers, normalize(words[i]))) {
          at = i;
          break;
        }
      }
      tags.push_back({BehaviorKind::eyebrow_raise, at, at});
      break;
    }
    case DiscourseRole::affirmation:
      tags.push_back({BehaviorKind::head_nod, 0, 0});
      break;
    case DiscourseRole::question:
      tags.push_back({BehaviorKind::eyebrow_raise, last, last});
      break;
  }
  if (words.size() > kGazeAwayWordThreshold) tags.push_back({BehaviorKind::gaze_away, 0, 0});
  return tags;
}

}  // namespace clara::nvb
