#include <gtest/gtest.h>

#include <random>

#include "clara/error.hpp"
#include "clara/game/forest.hpp"
#include "support.hpp"

using namespace clara;
using namespace clara::game;
namespace ct = clara::testing;

namespace {

constexpr const char* kSmall = R"(forest tiny start=a goal=c
area a
  text "Start."
  guardian "Owl"
  greet "Hoot."
  exits b
area b
  text "Middle."
  guardian "Fox"
  greet "Yip."
  greet "Hello."
  exits a c
  riddle rb correct=1 tag=t1
    prompt "Pick one"
    option "no"
    option "yes"
    hint "The second."
area c
  text "End."
  guardian "Bear"
  greet "Grr."
  exits b
  riddle rc correct=0 tag=t2
    prompt "Pick zero"
    option "yes"
    option "no"
    hint "The first."
)";

const Forest& forest() { return *ct::bundle().forest; }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

std::size_t wrong_answer(const Riddle& r) { return r.correct == 0 ? 1 : 0; }

}  // namespace

TEST(Forest, ShippedForestIsValid) {
  std::vector<std::string> registry;
  for (const auto& f : ct::bundle().facts) registry.push_back(f.tag);
  EXPECT_TRUE(check_forest(forest(), registry).empty());
  EXPECT_EQ(forest().areas.size(), 11u);
  EXPECT_EQ(forest().riddle_tags().size(), 10u);
  EXPECT_EQ(unavoidable_tags(forest()), std::set<std::string>(registry.begin(), registry.end()));
  EXPECT_EQ(forest().area_of_riddle("spread")->id, "brook");
}

TEST(Forest, ParseSmallDocument) {
  auto f = parse_forest(kSmall);
  EXPECT_EQ(f.id, "tiny");
  EXPECT_EQ(f.start, "a");
  EXPECT_EQ(f.goal, "c");
  ASSERT_EQ(f.areas.size(), 3u);
  EXPECT_EQ(f.areas[1].greetings.size(), 2u);
  EXPECT_EQ(f.areas[1].riddle->options.size(), 2u);
  EXPECT_EQ(f.areas[1].riddle->hint, "The second.");
  EXPECT_TRUE(check_forest(f).empty());
  EXPECT_FALSE(check_forest(f, {"t1"}).empty());
}

TEST(Forest, ParseErrors) {
  try {
    parse_forest(std::string(kSmall) + "bogus line\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
    EXPECT_EQ(e.line(), 28u);
  }
  std::string dup = kSmall;
  dup += "area a\n  text \"again\"\n";
  EXPECT_THROW(parse_forest(dup), ParseError);
  std::string bad_exit = kSmall;
  bad_exit.replace(bad_exit.find("exits a c"), 9, "exits a z");
  try {
    parse_forest(bad_exit);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ReferenceError);
  }
}

TEST(Forest, CheckFindsBrokenGraphs) {
  auto f = parse_forest(kSmall);
  auto unreachable = f;
  unreachable.areas[1].exits = {"a"};
  EXPECT_FALSE(check_forest(unreachable).empty());
  auto start_riddle = f;
  start_riddle.areas[0].riddle = f.areas[1].riddle;
  start_riddle.areas[0].riddle->id = "ra";
  EXPECT_FALSE(check_forest(start_riddle).empty());
  auto missing = f;
  missing.areas[2].riddle.reset();
  EXPECT_FALSE(check_forest(missing).empty());
  auto bad_index = f;
  bad_index.areas[2].riddle->correct = 5;
  EXPECT_FALSE(check_forest(bad_index).empty());
}

TEST(Game, FrontierAndAttempts) {
  const auto& f = forest();
  auto p = start_game(f, CharacterRole::Mage);
  EXPECT_EQ(p.unlocked, std::set<std::string>{"clearing"});
  EXPECT_EQ(frontier(p, f), std::vector<std::string>{"glade"});
  EXPECT_EQ(code_of([&] { attempt_riddle(p, f, "brook", 0); }), ErrorCode::AreaNotAdjacent);
  EXPECT_EQ(code_of([&] { attempt_riddle(p, f, "glade", 9); }), ErrorCode::InvalidChoiceIndex);
  EXPECT_EQ(code_of([&] { attempt_riddle(p, f, "nowhere", 0); }), ErrorCode::ReferenceError);

  const auto& glade = *f.find("glade")->riddle;
  auto missed = attempt_riddle(p, f, "glade", wrong_answer(glade));
  EXPECT_EQ(missed.unlocked, p.unlocked);
  EXPECT_EQ(missed.attempts.at("common_virus"), 1u);
  EXPECT_FALSE(hint_visible(missed, f, "glade"));
  missed = attempt_riddle(missed, f, "glade", wrong_answer(glade));
  EXPECT_TRUE(hint_visible(missed, f, "glade"));

  auto solved = attempt_riddle(missed, f, "glade", glade.correct);
  EXPECT_TRUE(solved.unlocked.count("glade"));
  EXPECT_TRUE(solved.solved.count("common_virus"));
  EXPECT_FALSE(hint_visible(solved, f, "glade"));
  EXPECT_EQ(frontier(solved, f), std::vector<std::string>{"brook"});
  EXPECT_EQ(code_of([&] { attempt_riddle(solved, f, "glade", glade.correct); }), ErrorCode::RiddleAlreadySolved);
}

TEST(Game, PartialPlaySummary) {
  const auto& f = forest();
  auto p = start_game(f, CharacterRole::Healer);
  std::uint32_t attempts = 0;
  for (const char* area : {"glade", "brook", "hollow"}) {
    const auto& r = *f.find(area)->riddle;
    p = attempt_riddle(p, f, area, wrong_answer(r));
    p = attempt_riddle(p, f, area, r.correct);
    attempts += 2;
  }
  auto summary = game_completion_summary(p, f);
  EXPECT_EQ(summary.facts_mastered, (std::set<std::string>{"hpv_common", "hpv_transmission", "hpv_symptoms"}));
  EXPECT_EQ(summary.total_attempts, attempts);
  EXPECT_EQ(summary.attempts.at("spread"), 2u);
  EXPECT_FALSE(summary.complete);
}

TEST(Game, RoleNeutrality) {
  const auto& f = forest();
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<std::string, std::size_t>> moves;
    auto probe = start_game(f, CharacterRole::Adventurer);
    for (int k = 0; k < 30; ++k) {
      auto fr = frontier(probe, f);
      if (fr.empty()) break;
      const auto& area = fr[0];
      auto answer = std::uniform_int_distribution<std::size_t>(0, f.find(area)->riddle->options.size() - 1)(rng);
      moves.emplace_back(area, answer);
      probe = attempt_riddle(probe, f, area, answer);
    }
    std::optional<CompletionSummary> first;
    for (auto role : kAllRoles) {
      auto p = start_game(f, role);
      for (const auto& [area, answer] : moves) p = attempt_riddle(p, f, area, answer);
      EXPECT_EQ(p.role, role);
      auto s = game_completion_summary(p, f);
      if (!first) first = s;
      EXPECT_EQ(s, *first) << to_string(role);
      EXPECT_EQ(frontier(p, f), frontier(probe, f));
    }
  }
  for (auto role : kAllRoles) {
    EXPECT_EQ(parse_role(to_string(role)), role);
    EXPECT_FALSE(role_descriptor(role).empty());
  }
}

TEST(Game, GreetingsAreDeterministic) {
  const auto& glade = *forest().find("glade");
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    auto g = guardian_greeting(glade, seed);
    EXPECT_EQ(g, guardian_greeting(glade, seed));
    EXPECT_NE(std::find(glade.greetings.begin(), glade.greetings.end(), g), glade.greetings.end());
    seen.insert(g);
  }
  EXPECT_EQ(seen.size(), glade.greetings.size());
}

TEST(Game, EngineRoleChoiceDoesNotChangeRiddles) {
  auto eng = ct::fixture_engine(Audience::adolescent);
  const std::vector<std::size_t> to_roles = {0, 0, 0, 2, 0};
  auto at = eng.replay(Audience::adolescent, {}, 4, to_roles);
  auto roles = eng.current_step(at).choices;
  ASSERT_EQ(roles.size(), std::size(kAllRoles));
  std::optional<engine::RenderStep> reference;
  for (std::size_t i = 0; i < roles.size(); ++i) {
    auto s = eng.advance(at, i);
    while (!s.finished && !eng.current_step(s).riddle) s = eng.advance(s, 0);
    ASSERT_FALSE(s.finished);
    auto step = eng.current_step(s);
    ASSERT_TRUE(step.riddle);
    step.riddle->role.clear();
    step.utterances.clear();
    if (!reference) reference = step;
    EXPECT_EQ(step, *reference) << roles[i].label;
  }
}
