#include <gtest/gtest.h>

#include "clara/error.hpp"
#include "clara/flows/audit.hpp"
#include "clara/flows/routing.hpp"
#include "support.hpp"

using namespace clara;
using namespace clara::flows;
namespace ct = clara::testing;

namespace {

StageOfChange expected_stage(int intent, int doses) {
  if (doses == 2) return StageOfChange::Maintenance;
  if (intent <= 2) return StageOfChange::Precontemplation;
  if (intent == 3) return StageOfChange::Contemplation;
  return StageOfChange::Preparation;
}

std::vector<std::string> effects_of(const engine::SessionState& s, const std::string& kind) {
  std::vector<std::string> out;
  for (const auto& e : s.transcript)
    if (e.kind == engine::EventKind::effect && e.payload.at("effect") == kind)
      out.push_back(e.payload.value("tag", e.payload.value("target", std::string())));
  return out;
}

const std::vector<std::size_t> kToParentCheck = {0, 0, 0, 2, 0};

}  // namespace

TEST(Routing, ClassifyStageTable) {
  for (int doses = 0; doses <= 2; ++doses)
    for (int intent = 1; intent <= 5; ++intent)
      EXPECT_EQ(classify_stage(intent, doses), expected_stage(intent, doses)) << intent << "," << doses;
  EXPECT_EQ(classify_stage(1, 0), StageOfChange::Precontemplation);
  EXPECT_EQ(classify_stage(3, 0), StageOfChange::Contemplation);
  EXPECT_EQ(classify_stage(5, 2), StageOfChange::Maintenance);
  for (auto [i, d] : {std::pair{0, 0}, {6, 0}, {3, 3}, {3, -1}}) {
    try {
      classify_stage(i, d);
      ADD_FAILURE() << i << "," << d;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
    }
  }
}

TEST(Routing, PublishedExamples) {
  EXPECT_EQ(select_phase_body(Audience::parent, StageOfChange::Precontemplation, false), PhaseBody::mi);
  EXPECT_EQ(select_phase_body(Audience::parent, StageOfChange::Precontemplation, true), PhaseBody::mi);
  EXPECT_EQ(select_phase_body(Audience::adolescent, StageOfChange::Contemplation, true), PhaseBody::game);
  EXPECT_EQ(select_phase_body(Audience::adolescent, StageOfChange::Contemplation, false), PhaseBody::education);
  EXPECT_EQ(select_phase_body(Audience::parent, StageOfChange::Contemplation, true), PhaseBody::education);
  EXPECT_EQ(select_coaching(Audience::parent, StageOfChange::Preparation), CoachingVariant::parent_ready_informational);
  EXPECT_EQ(select_coaching(Audience::adolescent, StageOfChange::Contemplation), CoachingVariant::adolescent_unsure_voice);
  EXPECT_EQ(select_coaching(Audience::parent, StageOfChange::Precontemplation),
            CoachingVariant::parent_hesitant_exploratory);
  EXPECT_EQ(select_coaching(Audience::adolescent, StageOfChange::Maintenance), CoachingVariant::adolescent_ready_express);
}

TEST(Routing, NamesRoundTrip) {
  for (auto b : {PhaseBody::education, PhaseBody::game, PhaseBody::mi}) EXPECT_EQ(parse_phase_body(to_string(b)), b);
  for (auto v : {CoachingVariant::parent_ready_informational, CoachingVariant::parent_hesitant_exploratory,
                 CoachingVariant::adolescent_ready_express, CoachingVariant::adolescent_unsure_voice})
    EXPECT_EQ(parse_coaching_variant(to_string(v)), v);
  EXPECT_FALSE(parse_phase_body("lecture"));
  EXPECT_EQ(phase_plan(Audience::parent).size(), 5u);
  EXPECT_EQ(phase_plan(Audience::adolescent)[2], "education|game|mi");
}

TEST(Routing, GuardFunctions) {
  auto fns = builtin_functions();
  using script::Value;
  std::vector<Value> args = {Value{std::int64_t{3}}, Value{std::int64_t{0}}};
  EXPECT_EQ(fns.at("stage_of")(args), Value{std::string("Contemplation")});
  std::vector<Value> unset = {Value{}, Value{std::int64_t{0}}};
  EXPECT_TRUE(script::is_unset(fns.at("stage_of")(unset)));
  std::vector<Value> body = {Value{std::string("adolescent")}, Value{std::string("Contemplation")}, Value{true}};
  EXPECT_EQ(fns.at("phase_body")(body), Value{std::string("game")});
  std::vector<Value> coach = {Value{std::string("parent")}, Value{std::string("Action")}};
  EXPECT_EQ(fns.at("coaching_for")(coach), Value{std::string("parent_ready_informational")});
}

TEST(Comprehension, Grading) {
  ComprehensionCheck c{"q", {"True", "False", "I don't know"}, 1, "hpv_common", {"education", "reteach_common"}};
  EXPECT_EQ(grade_comprehension(c, 1).kind, GradeKind::correct);
  auto miss = grade_comprehension(c, 0);
  EXPECT_EQ(miss.kind, GradeKind::incorrect_with_reteach);
  EXPECT_EQ(miss.reteach, c.reteach);
  EXPECT_EQ(grade_comprehension(c, 2, 1).kind, GradeKind::unmastered);
  EXPECT_EQ(grade_comprehension(c, 1, 1).kind, GradeKind::correct);
  EXPECT_THROW(grade_comprehension(c, 3), Error);
}

TEST(Comprehension, ChecksAreExtractedFromBundles) {
  const auto& b = ct::bundle();
  for (auto a : {Audience::parent, Audience::adolescent}) {
    const auto& s = b.script_for(a);
    auto checks = extract_checks(s);
    EXPECT_GE(checks.size(), 4u) << to_string(a);
    for (const auto& c : checks) {
      EXPECT_LT(c.correct, c.options.size());
      EXPECT_TRUE(s.has_fact(c.content_tag)) << c.content_tag;
      EXPECT_NE(s.find_state(c.reteach), nullptr);
    }
  }
}

TEST(Comprehension, FixtureWalkthroughs) {
  auto eng = ct::fixture_engine(Audience::parent);
  const auto bind = ct::default_bindings(Audience::parent);
  auto at = eng.replay(Audience::parent, bind, 1, kToParentCheck);
  ASSERT_EQ(at.current, (script::StateRef{"education", "check_common"}));

  auto right = eng.advance(at, 1);
  EXPECT_EQ(right.facts.at("hpv_common"), engine::FactStatus::mastered);
  EXPECT_TRUE(effects_of(right, "reteach").empty());

  auto wrong_then_right = eng.advance(eng.advance(eng.advance(at, 0), 0), 1);
  EXPECT_EQ(wrong_then_right.facts.at("hpv_common"), engine::FactStatus::mastered);
  EXPECT_EQ(effects_of(wrong_then_right, "reteach"), std::vector<std::string>{"hpv_common"});

  auto wrong_twice = eng.advance(eng.advance(eng.advance(at, 2), 0), 0);
  EXPECT_EQ(wrong_twice.facts.at("hpv_common"), engine::FactStatus::unmastered);
  EXPECT_EQ(wrong_twice.current.state, "f_symptoms");
}

TEST(Audits, RandomWalksSatisfyEveryAudit) {
  std::mt19937_64 rng(99);
  for (auto a : {Audience::parent, Audience::adolescent}) {
    auto eng = ct::fixture_engine(a);
    for (int i = 0; i < 150; ++i) {
      auto walk = ct::random_walk(eng, a, i, rng);
      auto s = eng.replay(a, ct::default_bindings(a), i, walk);
      auto findings = audit_session(s, eng.script());
      for (const auto& f : findings) ADD_FAILURE() << to_string(a) << " walk " << i << ": " << f.rule << " " << f.detail;
    }
  }
}

TEST(Audits, MiSequenceForPrecontemplation) {
  for (auto a : {Audience::parent, Audience::adolescent}) {
    auto eng = ct::fixture_engine(a);
    auto s = eng.replay(a, ct::default_bindings(a), 1, std::vector<std::size_t>{0, 0, 0, 0, 3, 2, 0, 6});
    ASSERT_EQ(s.current.network, "coaching") << to_string(a);
    auto mi = mi_state(s);
    EXPECT_EQ(mi.concern, Concern::age);
    EXPECT_TRUE(mi.validation_delivered);
    EXPECT_EQ(mi.change_talk, "peace_of_mind");
    EXPECT_EQ(mi.readiness, 7);
    EXPECT_TRUE(audit_mi_ordering(s.transcript).empty());
    EXPECT_EQ(s.stage(), StageOfChange::Precontemplation);
    for (const auto& tag : ct::bundle().facts) EXPECT_TRUE(s.facts.count(tag.tag)) << tag.tag;
  }
}

TEST(Audits, DetectViolations) {
  auto eng = ct::fixture_engine(Audience::parent);
  auto s = eng.replay(Audience::parent, ct::default_bindings(Audience::parent), 1, kToParentCheck);
  EXPECT_TRUE(audit_permission_gate(s.transcript).empty());

  auto tampered = s.transcript;
  std::erase_if(tampered, [](const engine::TranscriptEvent& e) {
    return e.kind == engine::EventKind::effect && e.payload.value("target", "") == "permission";
  });
  EXPECT_FALSE(audit_permission_gate(tampered).empty());

  auto reordered = s.transcript;
  std::swap(reordered[1], reordered[2]);
  EXPECT_FALSE(audit_event_order(reordered).empty());

  auto unbalanced = s.transcript;
  std::erase_if(unbalanced, [](const engine::TranscriptEvent& e) { return e.kind == engine::EventKind::network_exit; });
  EXPECT_FALSE(audit_stack_balance(unbalanced, true).empty());

  auto mi = eng.replay(Audience::parent, ct::default_bindings(Audience::parent), 1,
                       std::vector<std::size_t>{0, 0, 0, 0, 3, 2, 0, 6});
  auto swapped = mi.transcript;
  auto concern = std::find_if(swapped.begin(), swapped.end(),
                              [](const auto& e) { return e.kind == engine::EventKind::effect && e.payload.value("target", "") == "concern"; });
  auto talk = std::find_if(swapped.begin(), swapped.end(),
                           [](const auto& e) { return e.kind == engine::EventKind::effect && e.payload.value("target", "") == "change_talk"; });
  ASSERT_TRUE(concern != swapped.end() && talk != swapped.end());
  std::iter_swap(concern, talk);
  EXPECT_FALSE(audit_mi_ordering(swapped).empty());
}

TEST(Audits, GameOfferedAtMostOnce) {
  std::mt19937_64 rng(3);
  auto eng = ct::fixture_engine(Audience::adolescent);
  std::size_t offered_somewhere = 0;
  for (int i = 0; i < 200; ++i) {
    auto walk = ct::random_walk(eng, Audience::adolescent, i, rng);
    auto s = eng.replay(Audience::adolescent, {}, i, walk);
    std::size_t offers = 0;
    for (const auto& e : s.transcript)
      if (e.kind == engine::EventKind::choice_presented)
        for (const auto& c : e.payload.at("choices"))
          if (c.at("label") == "Play the forest game") ++offers;
    EXPECT_LE(offers, 1u);
    if (offers) {
      ++offered_somewhere;
      EXPECT_EQ(s.stage(), StageOfChange::Contemplation);
    }
  }
  EXPECT_GT(offered_somewhere, 0u);
}

TEST(QuestionMenu, CuratedQuestions) {
  const auto& menu = question_menu();
  EXPECT_GE(menu.size(), 3u);
  for (const auto& [topic, questions] : menu) {
    EXPECT_FALSE(questions.empty());
    for (const auto& q : questions) {
      EXPECT_TRUE(is_menu_question(topic, q));
      EXPECT_FALSE(is_menu_question(topic, q + " "));
    }
  }
  EXPECT_FALSE(is_menu_question("nonexistent", "Is the HPV vaccine safe?"));
  EXPECT_FALSE(is_menu_question("efficacy", "Is the HPV vaccine safe?"));
  for (const char* kind : {"transportation", "cost", "scheduling"}) EXPECT_FALSE(barrier_resolution(kind).empty());
  EXPECT_TRUE(barrier_resolution("weather").empty());
  for (auto c : {Concern::safety, Concern::side_effects, Concern::necessity, Concern::age, Concern::other})
    EXPECT_EQ(parse_concern(to_string(c)), c);
}
