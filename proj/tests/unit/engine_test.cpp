#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "clara/error.hpp"
#include "clara/flows/audit.hpp"
#include "clara/script/parser.hpp"
#include "support.hpp"

using namespace clara;
using engine::Engine;
using engine::EventKind;
using engine::SessionState;
namespace ct = clara::testing;

namespace {

constexpr const char* kCalls = R"(script calls version=2 audience=parent
meta content_source "test"
slot name required
slot pet "friend"
var mood enum good,bad
var stage enum early,late once
var count int 0..3 = 0
var seen bool = false
entry main

network main kind=plumbing
state start initial
  say "Hi {name}, meet my {pet}." role=greeting
  choice "Good" -> sub do set mood=good
  choice "Bad" -> sub do set mood=bad
  choice "Secret" -> sub if seen
state sub
  call helper return after
state after
  say "Back in main, mood {mood}, count {count}."
  choice "Stage early" -> staged do set stage=early
  choice "Overflow" -> staged do set count=9
state staged
  say "Stage is {stage}."
  choice "Again" -> staged do set stage=late
  choice "Done" -> done
state done terminal
  say "Bye."

network helper kind=education
state h1 initial
  assign count=1
  say "Helper sees {mood}." tags=fact_a
  goto h2 if mood == good
  goto h3
state h2 terminal
  say "Glad to hear it."
state h3 terminal
  say "Sorry to hear that."
)";

Engine calls_engine() {
  return Engine(std::make_shared<script::DialogueScript>(script::parse_script(kCalls)), {{}, nullptr, ct::stepping_clock()});
}

std::vector<std::string> texts(const SessionState& s) {
  std::vector<std::string> out;
  for (const auto& e : s.transcript)
    if (e.kind == EventKind::utterance) out.push_back(e.payload.at("text").get<std::string>());
  return out;
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Engine, StartsRendersAndFinishes) {
  auto eng = calls_engine();
  auto s = eng.start_session(Audience::parent, {{"name", "Ana"}}, 3);
  EXPECT_FALSE(s.finished);
  EXPECT_EQ(s.current, (script::StateRef{"main", "start"}));
  auto step = eng.current_step(s);
  ASSERT_EQ(step.utterances.size(), 1u);
  EXPECT_EQ(step.utterances[0].text, "Hi Ana, meet my friend.");
  EXPECT_FALSE(step.utterances[0].behaviors.empty());
  ASSERT_EQ(step.choices.size(), 2u);
  EXPECT_EQ(step.choices[1].label, "Bad");
  EXPECT_EQ(step.progress, "main");
  EXPECT_EQ(s.warnings.size(), 1u);

  s = eng.replay(Audience::parent, {{"name", "Ana"}}, 3, std::vector<std::size_t>{0, 0, 1});
  EXPECT_TRUE(s.finished);
  EXPECT_EQ(texts(s).back(), "Bye.");
  EXPECT_EQ(eng.closing_step(s).utterances.at(0).text, "Bye.");
  EXPECT_EQ(code_of([&] { eng.current_step(s); }), ErrorCode::SessionFinished);
  EXPECT_EQ(code_of([&] { eng.advance(s, 0); }), ErrorCode::SessionFinished);
}

TEST(Engine, AudienceAndBindingChecks) {
  auto eng = calls_engine();
  EXPECT_EQ(code_of([&] { eng.start_session(Audience::adolescent, {{"name", "A"}}, 1); }), ErrorCode::AudienceMismatch);
  EXPECT_EQ(code_of([&] { eng.start_session(Audience::both, {{"name", "A"}}, 1); }), ErrorCode::AudienceMismatch);
  EXPECT_EQ(code_of([&] { eng.start_session(Audience::parent, {}, 1); }), ErrorCode::MissingBinding);
  auto s = eng.start_session(Audience::parent, {{"name", "A"}, {"pet", "cat"}}, 1);
  EXPECT_TRUE(s.warnings.empty());
  EXPECT_EQ(texts(s).at(0), "Hi A, meet my cat.");
}

TEST(Engine, CallReturnAndAutomaticTransitions) {
  auto eng = calls_engine();
  auto good = eng.replay(Audience::parent, {{"name", "A"}}, 1, std::vector<std::size_t>{0});
  auto bad = eng.replay(Audience::parent, {{"name", "A"}}, 1, std::vector<std::size_t>{1});
  EXPECT_EQ(good.current, (script::StateRef{"main", "after"}));
  EXPECT_TRUE(good.call_stack.empty());
  auto g = texts(good), b = texts(bad);
  EXPECT_NE(std::find(g.begin(), g.end(), "Glad to hear it."), g.end());
  EXPECT_NE(std::find(b.begin(), b.end(), "Sorry to hear that."), b.end());
  EXPECT_EQ(g.back(), "Back in main, mood good, count 1.");
  EXPECT_EQ(good.facts.at("fact_a"), engine::FactStatus::presented);
  EXPECT_TRUE(flows::audit_stack_balance(good.transcript, false).empty());

  auto done = eng.replay(Audience::parent, {{"name", "A"}}, 1, std::vector<std::size_t>{0, 0, 1});
  EXPECT_TRUE(flows::audit_stack_balance(done.transcript, true).empty());
  EXPECT_TRUE(flows::audit_event_order(done.transcript).empty());
}

TEST(Engine, GuardsFilterChoices) {
  auto eng = calls_engine();
  auto s = eng.start_session(Audience::parent, {{"name", "A"}}, 1);
  EXPECT_EQ(eng.available_choices(s), (std::vector<std::size_t>{0, 1}));
  s.variables["seen"] = true;
  EXPECT_EQ(eng.available_choices(s), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(code_of([&] { eng.advance(s, 0); }), ErrorCode::GuardRace);
}

TEST(Engine, ChoiceAndVariableErrors) {
  auto eng = calls_engine();
  auto s = eng.start_session(Audience::parent, {{"name", "A"}}, 1);
  EXPECT_EQ(code_of([&] { eng.advance(s, 2); }), ErrorCode::InvalidChoiceIndex);
  EXPECT_EQ(code_of([&] { eng.advance(s, 99); }), ErrorCode::InvalidChoiceIndex);

  auto after = eng.replay(Audience::parent, {{"name", "A"}}, 1, std::vector<std::size_t>{0});
  EXPECT_EQ(code_of([&] { eng.advance(after, 1); }), ErrorCode::OutOfRange);
  auto staged = eng.advance(after, 0);
  EXPECT_EQ(std::get<std::string>(staged.variables.at("stage")), "early");
  EXPECT_EQ(code_of([&] { eng.advance(staged, 0); }), ErrorCode::ImmutableVariable);
}

TEST(Engine, ReplayReportsFailingPosition) {
  auto eng = calls_engine();
  try {
    eng.replay(Audience::parent, {{"name", "A"}}, 1, std::vector<std::size_t>{0, 0, 0, 0, 0, 7});
    FAIL() << "expected ReplayError";
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.position(), 2u);
    EXPECT_EQ(e.cause(), ErrorCode::ImmutableVariable);
  }
  try {
    eng.replay(Audience::parent, {{"name", "A"}}, 1, std::vector<std::size_t>{0, 0, 1, 0, 0, 5});
    FAIL() << "expected ReplayError";
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.position(), 3u);
    EXPECT_EQ(e.cause(), ErrorCode::SessionFinished);
  }
}

TEST(Engine, SessionJsonRoundTrip) {
  const auto& b = ct::bundle();
  std::mt19937_64 rng(5);
  for (auto a : {Audience::parent, Audience::adolescent}) {
    auto eng = ct::fixture_engine(a);
    for (int i = 0; i < 20; ++i) {
      auto walk = ct::random_walk(eng, a, 40 + i, rng);
      walk.resize(walk.size() / 2);
      auto s = eng.replay(a, ct::default_bindings(a), 40 + i, walk);
      auto back = engine::session_from_json(engine::to_json(s));
      EXPECT_TRUE(back.equivalent(s));
      EXPECT_EQ(engine::to_json(back), engine::to_json(s));
      if (!s.finished) EXPECT_EQ(eng.current_step(back), eng.current_step(s));
    }
  }
  (void)b;
}

TEST(Engine, TimestampsFormatAndParse) {
  auto tp = engine::Clock::time_point(std::chrono::milliseconds(1714555800123));
  EXPECT_EQ(engine::iso_timestamp(tp), "2024-05-01T09:30:00.123Z");
  EXPECT_EQ(engine::parse_iso_timestamp("2024-05-01T09:30:00.123Z"), tp);
}

TEST(EngineBundles, ParentWelcomeOffersEngageAndSource) {
  auto eng = ct::fixture_engine(Audience::parent);
  auto s = eng.start_session(Audience::parent, ct::default_bindings(Audience::parent), 1);
  auto step = eng.current_step(s);
  ASSERT_GE(step.choices.size(), 2u);
  bool source = false;
  for (const auto& c : step.choices)
    if (c.label.find("CDC") != std::string::npos) source = true;
  EXPECT_TRUE(source);
  EXPECT_NE(step.utterances.at(0).text.find("Sam"), std::string::npos);
  EXPECT_EQ(code_of([&] { eng.start_session(Audience::parent, {}, 1); }), ErrorCode::MissingBinding);
}

TEST(EngineBundles, AdolescentFallbackNameWarns) {
  auto eng = ct::fixture_engine(Audience::adolescent);
  auto s = eng.start_session(Audience::adolescent, {}, 1);
  EXPECT_NE(eng.current_step(s).utterances.at(0).text.find("there"), std::string::npos);
  EXPECT_EQ(s.warnings.size(), 1u);
  EXPECT_EQ(code_of([&] { eng.start_session(Audience::parent, {{"child_name", "x"}}, 1); }),
            ErrorCode::AudienceMismatch);
}

TEST(EngineBundles, StageIsAssignedOnce) {
  std::mt19937_64 rng(17);
  for (auto a : {Audience::parent, Audience::adolescent}) {
    auto eng = ct::fixture_engine(a);
    for (int i = 0; i < 40; ++i) {
      auto walk = ct::random_walk(eng, a, i, rng);
      auto s = eng.replay(a, ct::default_bindings(a), i, walk);
      EXPECT_TRUE(flows::audit_stage_immutability(s.transcript).empty());
      EXPECT_TRUE(flows::audit_stack_balance(s.transcript, s.finished).empty());
      EXPECT_TRUE(flows::audit_event_order(s.transcript).empty());
    }
  }
}

TEST(EngineBundles, GoldenParentTranscript) {
  auto eng = ct::fixture_engine(Audience::parent);
  std::mt19937_64 rng(2024);
  auto walk = ct::random_walk(eng, Audience::parent, 11, rng);
  auto s = eng.replay(Audience::parent, ct::default_bindings(Audience::parent), 11, walk);
  ASSERT_TRUE(s.finished);
  std::string text;
  for (auto c : walk) text += std::to_string(c) + ' ';
  text += '\n' + engine::transcript_jsonl(s.transcript, true);
  const auto path = ct::data_dir() / "golden" / "parent_transcript.txt";
  if (std::getenv("CLARA_UPDATE_GOLDEN")) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << text;
  }
  EXPECT_EQ(text, ct::slurp(path));
}
