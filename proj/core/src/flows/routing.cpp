#include "clara/flows/routing.hpp"

#include <algorithm>

#include "clara/error.hpp"

namespace clara::flows {

std::string_view to_string(PhaseBody b) {
  switch (b) {
    case PhaseBody::education: return "education";
    case PhaseBody::game: return "game";
    case PhaseBody::mi: return "mi";
  }
  return "?";
}

std::string_view to_string(CoachingVariant v) {
  switch (v) {
    case CoachingVariant::parent_ready_informational: return "parent_ready_informational";
    case CoachingVariant::parent_hesitant_exploratory: return "parent_hesitant_exploratory";
    case CoachingVariant::adolescent_ready_express: return "adolescent_ready_express";
    case CoachingVariant::adolescent_unsure_voice: return "adolescent_unsure_voice";
  }
  return "?";
}

std::optional<PhaseBody> parse_phase_body(std::string_view text) {
  for (auto b : {PhaseBody::education, PhaseBody::game, PhaseBody::mi})
    if (to_string(b) == text) return b;
  return std::nullopt;
}

std::optional<CoachingVariant> parse_coaching_variant(std::string_view text) {
  for (auto v : {CoachingVariant::parent_ready_informational, CoachingVariant::parent_hesitant_exploratory,
                 CoachingVariant::adolescent_ready_express, CoachingVariant::adolescent_unsure_voice})
    if (to_string(v) == text) return v;
  return std::nullopt;
}

StageOfChange classify_stage(int intent_response, int vaccinated_doses) {
  if (intent_response < 1 || intent_response > 5)
    throw Error(ErrorCode::OutOfRange, "intent response must be within 1..5, got " + std::to_string(intent_response));
  if (vaccinated_doses < 0 || vaccinated_doses > 2)
    throw Error(ErrorCode::OutOfRange, "doses must be within 0..2, got " + std::to_string(vaccinated_doses));
  if (vaccinated_doses == 2) return StageOfChange::Maintenance;
  if (intent_response <= 2) return StageOfChange::Precontemplation;
  if (intent_response == 3) return StageOfChange::Contemplation;
  return StageOfChange::Preparation;
}

PhaseBody select_phase_body(Audience audience, StageOfChange stage, bool game_opt_in) {
  if (stage == StageOfChange::Precontemplation) return PhaseBody::mi;
  if (audience == Audience::adolescent && stage == StageOfChange::Contemplation && game_opt_in)
    return PhaseBody::game;
  return PhaseBody::education;
}

CoachingVariant select_coaching(Audience audience, StageOfChange stage) {
  const bool ready = stage >= StageOfChange::Preparation;
  if (audience == Audience::parent)
    return ready ? CoachingVariant::parent_ready_informational : CoachingVariant::parent_hesitant_exploratory;
  return ready ? CoachingVariant::adolescent_ready_express : CoachingVariant::adolescent_unsure_voice;
}

std::vector<std::string> phase_plan(Audience audience) {
  if (audience == Audience::adolescent) return {"rapport", "staging", "education|game|mi", "coaching", "barriers"};
  return {"rapport", "staging", "education|mi", "coaching", "barriers"};
}

namespace {

using script::Value;

std::optional<std::int64_t> int_arg(const Value& v) {
  if (auto i = std::get_if<std::int64_t>(&v)) return *i;
  return std::nullopt;
}

std::optional<std::string> text_arg(const Value& v) {
  if (auto s = std::get_if<std::string>(&v)) return *s;
  return std::nullopt;
}

void expect_args(std::string_view name, std::span<const Value> args, std::size_t n) {
  if (args.size() != n)
    throw Error(ErrorCode::TypeError,
                std::string(name) + " takes " + std::to_string(n) + " arguments, got " + std::to_string(args.size()));
}

}  // namespace

script::FunctionTable builtin_functions() {
  script::FunctionTable t;
  t["stage_of"] = [](std::span<const Value> args) -> Value {
    expect_args("stage_of", args, 2);
    auto intent = int_arg(args[0]);
    auto doses = int_arg(args[1]);
    if (!intent || !doses) return Value{};
    return std::string(to_string(classify_stage(static_cast<int>(*intent), static_cast<int>(*doses))));
  };
  t["phase_body"] = [](std::span<const Value> args) -> Value {
    expect_args("phase_body", args, 3);
    auto audience = text_arg(args[0]);
    auto stage = text_arg(args[1]);
    if (!audience || !stage) return Value{};
    auto a = parse_audience(*audience);
    auto s = parse_stage(*stage);
    if (!a || !s) return Value{};
    const bool opt_in = script::truthy(args[2]);
    return std::string(to_string(select_phase_body(*a, *s, opt_in)));
  };
  t["coaching_for"] = [](std::span<const Value> args) -> Value {
    expect_args("coaching_for", args, 2);
    auto audience = text_arg(args[0]);
    auto stage = text_arg(args[1]);
    if (!audience || !stage) return Value{};
    auto a = parse_audience(*audience);
    auto s = parse_stage(*stage);
    if (!a || !s) return Value{};
    return std::string(to_string(select_coaching(*a, *s)));
  };
  return t;
}

GradeResult grade_comprehension(const ComprehensionCheck& check, std::size_t answer, unsigned prior_misses) {
  if (answer >= check.options.size())
    throw Error(ErrorCode::InvalidChoiceIndex, "answer " + std::to_string(answer) + " out of range");
  if (answer == check.correct) return {GradeKind::correct, std::nullopt};
  if (prior_misses == 0) return {GradeKind::incorrect_with_reteach, check.reteach};
  return {GradeKind::unmastered, std::nullopt};
}

std::vector<ComprehensionCheck> extract_checks(const script::DialogueScript& script) {
  std::vector<ComprehensionCheck> out;
  for (const auto& net : script.networks) {
    for (const auto& st : net.states) {
      if (st.choices.size() < 2 || st.utterances.empty()) continue;
      std::optional<std::size_t> correct;
      std::string tag;
      std::optional<std::string> reteach_target;
      bool consistent = true;
      for (std::size_t i = 0; i < st.choices.size() && consistent; ++i) {
        const auto& ch = st.choices[i];
        bool marked = false;
        for (const auto& e : ch.effects) {
          if (e.kind != script::EffectKind::master && e.kind != script::EffectKind::reteach) continue;
          if (!tag.empty() && tag != e.target) consistent = false;
          tag = e.target;
          marked = true;
          if (e.kind == script::EffectKind::master) {
            if (correct) consistent = false;
            correct = i;
          } else {
            if (reteach_target && *reteach_target != ch.target) consistent = false;
            reteach_target = ch.target;
          }
        }
        if (!marked) consistent = false;
      }
      if (!consistent || !correct || !reteach_target) continue;
      ComprehensionCheck c;
      c.question = st.utterances.back().text;
      for (const auto& ch : st.choices) c.options.push_back(ch.label);
      c.correct = *correct;
      c.content_tag = tag;
      c.reteach = {net.id, *reteach_target};
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::string_view to_string(Concern c) {
  switch (c) {
    case Concern::safety: return "safety";
    case Concern::side_effects: return "side_effects";
    case Concern::necessity: return "necessity";
    case Concern::age: return "age";
    case Concern::other: return "other";
  }
  return "?";
}

std::optional<Concern> parse_concern(std::string_view text) {
  for (auto c : {Concern::safety, Concern::side_effects, Concern::necessity, Concern::age, Concern::other})
    if (to_string(c) == text) return c;
  return std::nullopt;
}

MIState mi_state(const engine::SessionState& session) {
  MIState m;
  auto text = [&](const char* name) -> std::optional<std::string> {
    auto it = session.variables.find(name);
    if (it == session.variables.end()) return std::nullopt;
    if (auto s = std::get_if<std::string>(&it->second)) return *s;
    return std::nullopt;
  };
  if (auto c = text("concern")) m.concern = parse_concern(*c);
  if (auto it = session.variables.find("validated"); it != session.variables.end())
    m.validation_delivered = script::truthy(it->second);
  m.change_talk = text("change_talk");
  m.readiness = session.readiness();
  return m;
}

const std::map<std::string, std::vector<std::string>>& question_menu() {
  static const std::map<std::string, std::vector<std::string>> menu = {
      {"safety",
       {"Does the shot hurt?", "Is the HPV vaccine safe?", "What side effects should we watch for?"}},
      {"efficacy", {"How well does the vaccine prevent cancer?", "How long does the protection last?"}},
      {"recommendations", {"Why is it recommended at age 11 or 12?", "How many doses are needed?"}},
      {"other", {"Can it be given at the same visit as other shots?", "Does insurance cover the vaccine?"}},
  };
  return menu;
}

bool is_menu_question(std::string_view topic, std::string_view text) {
  const auto& menu = question_menu();
  auto it = menu.find(std::string(topic));
  return it != menu.end() && std::find(it->second.begin(), it->second.end(), text) != it->second.end();
}

std::string_view barrier_resolution(std::string_view kind) {
  if (kind == "transportation")
    return "Many clinics can help arrange a ride, and some pharmacies give the HPV vaccine too.";
  if (kind == "cost")
    return "Most insurance plans and the Vaccines for Children program cover the HPV vaccine at no cost.";
  if (kind == "scheduling")
    return "The shot can be given at a visit you already have planned, and it only takes a few minutes.";
  return {};
}

}  // namespace clara::flows
