#include <gtest/gtest.h>

#include <random>

#include "clara/error.hpp"
#include "clara/nvb/annotator.hpp"

using namespace clara;
using namespace clara::nvb;

namespace {

std::vector<BehaviorTag> run(std::string_view text, std::vector<std::size_t> hints, DiscourseRole role) {
  return annotate(text, hints, role);
}

bool has(const std::vector<BehaviorTag>& tags, BehaviorTag t) {
  return std::find(tags.begin(), tags.end(), t) != tags.end();
}

}  // namespace

TEST(Nvb, SplitWords) {
  EXPECT_EQ(split_words("  Hello,   world!  ").size(), 2u);
  EXPECT_EQ(split_words("a\tb\nc")[2], "c");
  EXPECT_TRUE(split_words(" \t ").empty());
}

TEST(Nvb, GreetingExample) {
  auto tags = run("Hello!", {}, DiscourseRole::greeting);
  EXPECT_TRUE(has(tags, {BehaviorKind::smile, 0, 0}));
  EXPECT_TRUE(has(tags, {BehaviorKind::gaze_toward, 0, 0}));
  EXPECT_EQ(tags.size(), 2u);
}

TEST(Nvb, LongUtteranceWithHint) {
  const std::string text = "The vaccine works best when it is given at ages eleven to twelve years old.";
  ASSERT_EQ(split_words(text).size(), 15u);
  auto tags = run(text, {4}, DiscourseRole::new_information);
  EXPECT_TRUE(has(tags, {BehaviorKind::beat_gesture, 4, 4}));
  EXPECT_TRUE(has(tags, {BehaviorKind::gaze_away, 0, 0}));
  EXPECT_EQ(tags.size(), 2u);
}

TEST(Nvb, RuleTable) {
  EXPECT_EQ(run("Most people get HPV.", {}, DiscourseRole::new_information),
            (std::vector<BehaviorTag>{{BehaviorKind::beat_gesture, 0, 0}}));
  EXPECT_EQ(run("The virus is common.", {}, DiscourseRole::new_information),
            (std::vector<BehaviorTag>{{BehaviorKind::beat_gesture, 1, 1}}));
  auto multi = run("One two three four", {1, 3}, DiscourseRole::new_information);
  EXPECT_TRUE(has(multi, {BehaviorKind::beat_gesture, 1, 1}));
  EXPECT_TRUE(has(multi, {BehaviorKind::beat_gesture, 3, 3}));
  EXPECT_TRUE(has(run("It is safe, but some feel sore.", {}, DiscourseRole::contrast),
                  {BehaviorKind::eyebrow_raise, 3, 3}));
  EXPECT_TRUE(has(run("Not through blood at all.", {2}, DiscourseRole::contrast), {BehaviorKind::eyebrow_raise, 2, 2}));
  EXPECT_TRUE(has(run("Not through blood at all.", {}, DiscourseRole::contrast), {BehaviorKind::eyebrow_raise, 0, 0}));
  EXPECT_EQ(run("That makes sense.", {}, DiscourseRole::affirmation),
            (std::vector<BehaviorTag>{{BehaviorKind::head_nod, 0, 0}}));
  EXPECT_EQ(run("Is that okay with you?", {}, DiscourseRole::question),
            (std::vector<BehaviorTag>{{BehaviorKind::eyebrow_raise, 4, 4}}));
  EXPECT_TRUE(has(run("Welcome back to the clinic", {}, DiscourseRole::greeting), {BehaviorKind::smile, 0, 4}));
}

TEST(Nvb, GazeAwayThreshold) {
  std::string twelve, thirteen;
  for (int i = 0; i < 12; ++i) twelve += "word ";
  thirteen = twelve + "more";
  auto g12 = run(twelve, {}, DiscourseRole::affirmation);
  auto g13 = run(thirteen, {}, DiscourseRole::affirmation);
  EXPECT_FALSE(has(g12, {BehaviorKind::gaze_away, 0, 0}));
  EXPECT_TRUE(has(g13, {BehaviorKind::gaze_away, 0, 0}));
}

TEST(Nvb, EmptyTextThrows) {
  for (const char* t : {"", "   ", "\n\t"}) {
    try {
      run(t, {}, DiscourseRole::greeting);
      ADD_FAILURE() << "no throw";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::EmptyText);
    }
  }
}

TEST(Nvb, OutOfRangeHintsIgnored) {
  EXPECT_EQ(run("Short one.", {7, 100}, DiscourseRole::new_information),
            run("Short one.", {}, DiscourseRole::new_information));
}

TEST(Nvb, FuzzSpansStayInBoundsAndDeterministic) {
  std::mt19937_64 rng(42);
  const std::vector<std::string> vocab = {"the", "vaccine", "but", "HPV", "is", "safe,", "however", "a", "?", "cancer."};
  for (int i = 0; i < 3000; ++i) {
    std::string text;
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 30)(rng);
    for (std::size_t w = 0; w < n; ++w) text += vocab[rng() % vocab.size()] + std::string(rng() % 3 + 1, ' ');
    std::vector<std::size_t> hints;
    for (std::size_t h = rng() % 4; h > 0; --h) hints.push_back(rng() % 40);
    auto role = static_cast<DiscourseRole>(rng() % 5);
    auto tags = annotate(text, hints, role);
    EXPECT_EQ(tags, annotate(text, hints, role));
    EXPECT_FALSE(tags.empty());
    for (const auto& t : tags) {
      EXPECT_LE(t.start, t.end);
      EXPECT_LT(t.end, n);
    }
    EXPECT_EQ(has(tags, {BehaviorKind::gaze_away, 0, 0}), n > kGazeAwayWordThreshold);
  }
}

TEST(Nvb, Names) {
  for (auto r : {DiscourseRole::greeting, DiscourseRole::new_information, DiscourseRole::contrast,
                 DiscourseRole::affirmation, DiscourseRole::question})
    EXPECT_EQ(parse_discourse_role(to_string(r)), r);
  EXPECT_FALSE(parse_discourse_role("shout"));
  EXPECT_EQ(to_string(BehaviorKind::beat_gesture), "beat_gesture");
}
