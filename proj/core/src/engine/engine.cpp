#include "clara/engine/engine.hpp"

#include <algorithm>

#include "clara/error.hpp"
#include "clara/script/vocabulary.hpp"

namespace clara::engine {

using script::DialogueState;
using script::Effect;
using script::EffectKind;
using script::StateRef;
using script::Value;

namespace {

constexpr std::string_view kRetryLine = "Not quite. Take another look and try again.";

nlohmann::ordered_json tags_json(const std::vector<std::string>& tags) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& t : tags) j.push_back(t);
  return j;
}

nlohmann::ordered_json value_json(const Value& v) { return nlohmann::ordered_json::parse(to_json(v).dump()); }

}  // namespace

class Engine::Runner : public script::EvalContext {
 public:
  Runner(const Engine& engine, SessionState& session)
      : engine_(engine), script_(*engine.script_), s_(session) {}

  std::optional<Value> variable(std::string_view name) const override {
    if (name == script::kAudienceVariable) return Value{std::string(to_string(s_.audience))};
    if (!script_.find_variable(name)) return std::nullopt;
    auto it = s_.variables.find(std::string(name));
    return it == s_.variables.end() ? Value{} : it->second;
  }

  Value call(std::string_view name, std::span<const Value> args) const override {
    auto it = engine_.options_.functions.find(name);
    if (it == engine_.options_.functions.end())
      throw Error(ErrorCode::ReferenceError, "unknown function '" + std::string(name) + "'");
    return it->second(args);
  }

  void emit(EventKind kind, nlohmann::ordered_json payload) {
    TranscriptEvent e;
    e.seq = s_.transcript.empty() ? 1 : s_.transcript.back().seq + 1;
    e.kind = kind;
    e.payload = std::move(payload);
    e.ts = engine_.options_.clock ? engine_.options_.clock() : Clock::now();
    s_.transcript.push_back(std::move(e));
  }

  const DialogueState& state_at(const StateRef& ref) const {
    auto st = script_.find_state(ref);
    if (!st) throw Error(ErrorCode::ReferenceError, "unknown state '" + to_string(ref) + "'");
    return *st;
  }

  std::vector<std::size_t> guard_filtered(const DialogueState& st) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < st.choices.size(); ++i)
      if (!st.choices[i].guard || script::holds(*st.choices[i].guard, *this)) out.push_back(i);
    return out;
  }

  std::string resolve_slots(std::string_view text) {
    std::string out;
    std::size_t pos = 0;
    while (pos < text.size()) {
      auto open = text.find('{', pos);
      auto close = open == std::string_view::npos ? open : text.find('}', open + 1);
      if (close == std::string_view::npos) {
        out.append(text.substr(pos));
        break;
      }
      out.append(text.substr(pos, open - pos));
      out += slot_value(std::string(text.substr(open + 1, close - open - 1)));
      pos = close + 1;
    }
    return out;
  }

  std::string slot_value(const std::string& name) {
    if (auto it = s_.bindings.find(name); it != s_.bindings.end()) return it->second;
    if (auto v = variable(name); v && !script::is_unset(*v)) return script::to_string(*v);
    if (auto it = script_.metadata.find(name); it != script_.metadata.end()) return it->second;
    auto slot = script_.find_slot(name);
    std::string warning = "slot '" + name + "' has no binding; rendered fallback";
    if (std::find(s_.warnings.begin(), s_.warnings.end(), warning) == s_.warnings.end())
      s_.warnings.push_back(std::move(warning));
    return slot ? slot->fallback : std::string();
  }

  void say(const StateRef& where, std::string text, std::vector<std::string> tags, std::vector<std::size_t> emphasis,
           nvb::DiscourseRole role) {
    for (const auto& t : tags) s_.facts.try_emplace(t, FactStatus::presented);
    nlohmann::ordered_json p;
    p["state"] = to_string(where);
    p["text"] = text;
    p["tags"] = tags_json(tags);
    p["role"] = nvb::to_string(role);
    emit(EventKind::utterance, std::move(p));
    s_.pending.push_back({std::move(text), std::move(tags), std::move(emphasis), role});
  }

  void assign(const std::string& target, const Value& value) {
    if (target == script::kAudienceVariable) throw Error(ErrorCode::TypeError, "audience cannot be assigned");
    auto decl = script_.find_variable(target);
    if (!decl) throw Error(ErrorCode::ReferenceError, "undeclared variable '" + target + "'");
    switch (decl->type) {
      case script::VarType::boolean:
        if (!std::holds_alternative<bool>(value))
          throw Error(ErrorCode::TypeError, "'" + target + "' expects a boolean, got " + script::to_string(value));
        break;
      case script::VarType::integer: {
        auto i = std::get_if<std::int64_t>(&value);
        if (!i) throw Error(ErrorCode::TypeError, "'" + target + "' expects an integer, got " + script::to_string(value));
        if (decl->range && (*i < decl->range->first || *i > decl->range->second))
          throw Error(ErrorCode::OutOfRange, "'" + target + "' value " + std::to_string(*i) + " out of range");
        break;
      }
      case script::VarType::enumeration: {
        auto m = std::get_if<std::string>(&value);
        if (!m || std::find(decl->members.begin(), decl->members.end(), *m) == decl->members.end())
          throw Error(ErrorCode::TypeError, "'" + script::to_string(value) + "' is not a member of '" + target + "'");
        break;
      }
    }
    auto& slot = s_.variables[target];
    if (decl->once && !script::is_unset(slot))
      throw Error(ErrorCode::ImmutableVariable, "'" + target + "' is already set to " + script::to_string(slot));
    slot = value;
  }

  void apply(const Effect& e) {
    nlohmann::ordered_json p;
    p["effect"] = to_string(e.kind);
    switch (e.kind) {
      case EffectKind::set: {
        auto v = script::evaluate(e.value, *this);
        assign(e.target, v);
        p["target"] = e.target;
        p["value"] = value_json(v);
        break;
      }
      case EffectKind::flag:
        p["topic"] = e.target;
        p["text"] = e.text;
        break;
      case EffectKind::barrier:
        p["kind"] = e.target;
        break;
      case EffectKind::ruler: {
        auto v = script::evaluate(e.value, *this);
        auto i = std::get_if<std::int64_t>(&v);
        if (!i || *i < script::kRulerMin || *i > script::kRulerMax)
          throw Error(ErrorCode::OutOfRange, "readiness must be within 1..10, got " + script::to_string(v));
        assign(std::string(script::kReadinessVariable), v);
        p["value"] = *i;
        break;
      }
      case EffectKind::master:
        s_.facts[e.target] = FactStatus::mastered;
        p["tag"] = e.target;
        break;
      case EffectKind::unmaster:
        s_.facts[e.target] = FactStatus::unmastered;
        p["tag"] = e.target;
        break;
      case EffectKind::reteach:
        p["tag"] = e.target;
        break;
      case EffectKind::role: {
        auto role = game::parse_role(e.target);
        if (!role) throw Error(ErrorCode::TypeError, "unknown character role '" + e.target + "'");
        if (!engine_.options_.forest) throw Error(ErrorCode::GameNotStarted, "no forest is configured");
        s_.game = game::start_game(*engine_.options_.forest, *role);
        p["role"] = e.target;
        p["descriptor"] = game::role_descriptor(*role);
        break;
      }
    }
    emit(EventKind::effect, std::move(p));
  }

  const game::Forest& forest() const {
    if (!engine_.options_.forest) throw Error(ErrorCode::GameNotStarted, "no forest is configured");
    return *engine_.options_.forest;
  }

  const game::Area& gate_area(const DialogueState& st) const {
    auto area = forest().find(st.riddle->area);
    if (!area || !area->riddle)
      throw Error(ErrorCode::ReferenceError, "riddle gate names unknown area '" + st.riddle->area + "'");
    return *area;
  }

  void present_riddle(const StateRef& where, const DialogueState& st, bool retry) {
    const auto& area = gate_area(st);
    const auto& r = *area.riddle;
    if (!retry) {
      auto greeting = game::guardian_greeting(area, s_.rng_seed);
      if (!greeting.empty()) say(where, greeting, {}, {}, nvb::DiscourseRole::greeting);
    } else {
      say(where, std::string(kRetryLine), {}, {}, nvb::DiscourseRole::contrast);
    }
    say(where, r.prompt, {r.tag}, {}, nvb::DiscourseRole::question);
    if (game::hint_visible(*s_.game, forest(), area.id) && !r.hint.empty())
      say(where, "Hint: " + r.hint, {}, {}, nvb::DiscourseRole::new_information);
    s_.presented.clear();
    auto choices = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.options.size(); ++i) {
      s_.presented.push_back(i);
      nlohmann::ordered_json c;
      c["index"] = i;
      c["label"] = r.options[i];
      choices.push_back(std::move(c));
    }
    nlohmann::ordered_json p;
    p["state"] = to_string(where);
    p["riddle"] = r.id;
    p["choices"] = std::move(choices);
    emit(EventKind::choice_presented, std::move(p));
  }

  void finish_exit(const StateRef& where) {
    nlohmann::ordered_json p;
    p["network"] = where.network;
    p["reason"] = "exit";
    emit(EventKind::network_exit, std::move(p));
    while (!s_.call_stack.empty()) {
      nlohmann::ordered_json q;
      q["network"] = s_.call_stack.back().network;
      q["reason"] = "exit";
      emit(EventKind::network_exit, std::move(q));
      s_.call_stack.pop_back();
    }
    s_.finished = true;
  }

  /// Enters `pos` and follows automatic steps until input is needed or the session ends.
  void settle(StateRef pos) {
    s_.presented.clear();
    for (std::size_t steps = 0;; ++steps) {
      if (steps > engine_.options_.max_auto_steps)
        throw Error(ErrorCode::DeadSession, "automatic transitions do not settle near '" + to_string(pos) + "'");
      s_.current = pos;
      const auto& st = state_at(pos);
      for (const auto& u : st.utterances) say(pos, resolve_slots(u.text), u.content_tags, u.emphasis, u.role);
      for (const auto& e : st.on_enter) apply(e);

      if (st.terminal) {
        if (st.exit) {
          finish_exit(pos);
          return;
        }
        nlohmann::ordered_json p;
        p["network"] = pos.network;
        p["reason"] = s_.call_stack.empty() ? "finish" : "return";
        emit(EventKind::network_exit, std::move(p));
        if (s_.call_stack.empty()) {
          s_.finished = true;
          return;
        }
        auto frame = s_.call_stack.back();
        s_.call_stack.pop_back();
        pos = {frame.network, frame.return_state};
        continue;
      }
      if (st.call) {
        if (s_.call_stack.size() >= script::kMaxCallDepth)
          throw Error(ErrorCode::CallDepthExceeded, "call depth would exceed " + std::to_string(script::kMaxCallDepth));
        auto callee = script_.find_network(st.call->network);
        if (!callee || !callee->initial())
          throw Error(ErrorCode::ReferenceError, "cannot call network '" + st.call->network + "'");
        s_.call_stack.push_back({pos.network, st.call->on_return});
        nlohmann::ordered_json p;
        p["network"] = callee->id;
        p["via"] = "call";
        emit(EventKind::network_enter, std::move(p));
        pos = {callee->id, callee->initial()->id};
        continue;
      }
      if (!st.transitions.empty()) {
        auto it = std::find_if(st.transitions.begin(), st.transitions.end(),
                               [&](const script::Transition& t) { return !t.guard || script::holds(*t.guard, *this); });
        if (it == st.transitions.end())
          throw Error(ErrorCode::DeadSession, "no transition applies at '" + to_string(pos) + "'");
        pos = {pos.network, it->target};
        continue;
      }
      if (st.riddle) {
        if (!s_.game) throw Error(ErrorCode::GameNotStarted, "riddle gate reached before a role was chosen");
        const auto& area = gate_area(st);
        if (s_.game->solved.count(area.riddle->id)) {
          pos = {pos.network, st.riddle->next};
          continue;
        }
        present_riddle(pos, st, false);
        return;
      }
      auto offered = guard_filtered(st);
      if (offered.empty()) throw Error(ErrorCode::DeadSession, "no choice is available at '" + to_string(pos) + "'");
      s_.presented = offered;
      auto choices = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < offered.size(); ++i) {
        nlohmann::ordered_json c;
        c["index"] = i;
        c["label"] = st.choices[offered[i]].label;
        choices.push_back(std::move(c));
      }
      nlohmann::ordered_json p;
      p["state"] = to_string(pos);
      p["choices"] = std::move(choices);
      emit(EventKind::choice_presented, std::move(p));
      return;
    }
  }

  void take(std::size_t index) {
    if (s_.finished) throw Error(ErrorCode::SessionFinished, "session has finished");
    const auto pos = s_.current;
    const auto& st = state_at(pos);
    if (st.riddle) {
      take_riddle(pos, st, index);
      return;
    }
    if (guard_filtered(st) != s_.presented)
      throw Error(ErrorCode::GuardRace, "choices at '" + to_string(pos) + "' changed since they were presented");
    if (index >= s_.presented.size())
      throw Error(ErrorCode::InvalidChoiceIndex, "choice " + std::to_string(index) + " is not among the " +
                                                     std::to_string(s_.presented.size()) + " presented");
    const auto& choice = st.choices[s_.presented[index]];
    nlohmann::ordered_json p;
    p["state"] = to_string(pos);
    p["index"] = index;
    p["label"] = choice.label;
    emit(EventKind::choice_taken, std::move(p));
    s_.pending.clear();
    for (const auto& e : choice.effects) apply(e);
    settle({pos.network, choice.target});
  }

  void take_riddle(const StateRef& pos, const DialogueState& st, std::size_t index) {
    const auto& area = gate_area(st);
    const auto& r = *area.riddle;
    if (index >= s_.presented.size())
      throw Error(ErrorCode::InvalidChoiceIndex, "answer " + std::to_string(index) + " is not among the " +
                                                     std::to_string(s_.presented.size()) + " presented");
    nlohmann::ordered_json p;
    p["state"] = to_string(pos);
    p["index"] = index;
    p["label"] = r.options[s_.presented[index]];
    emit(EventKind::choice_taken, std::move(p));
    s_.pending.clear();
    auto next = game::attempt_riddle(*s_.game, forest(), area.id, s_.presented[index]);
    const bool correct = next.solved.count(r.id) > 0;
    s_.game = std::move(next);
    nlohmann::ordered_json q;
    q["effect"] = "riddle";
    q["area"] = area.id;
    q["riddle"] = r.id;
    q["correct"] = correct;
    q["attempts"] = s_.game->attempts[r.id];
    emit(EventKind::effect, std::move(q));
    if (correct) {
      Effect m;
      m.kind = EffectKind::master;
      m.target = r.tag;
      apply(m);
      settle({pos.network, st.riddle->next});
    } else {
      present_riddle(pos, st, true);
    }
  }

 private:
  const Engine& engine_;
  const script::DialogueScript& script_;
  SessionState& s_;
};

Engine::Engine(std::shared_ptr<const script::DialogueScript> script, EngineOptions options)
    : script_(std::move(script)), options_(std::move(options)) {
  if (!script_) throw Error(ErrorCode::InvalidArgument, "engine needs a script");
}

SessionState Engine::start_session(Audience audience, const Bindings& bindings, std::uint64_t seed,
                                   std::string session_id) const {
  if (audience == Audience::both)
    throw Error(ErrorCode::AudienceMismatch, "a session belongs to a parent or an adolescent");
  if (!audience_compatible(script_->audience, audience))
    throw Error(ErrorCode::AudienceMismatch, "script '" + script_->id + "' is for " +
                                                 std::string(to_string(script_->audience)) + ", not " +
                                                 std::string(to_string(audience)));
  for (const auto& slot : script_->slots)
    if (slot.required && !bindings.count(slot.name))
      throw Error(ErrorCode::MissingBinding, "required slot '" + slot.name + "' is not bound");
  SessionState s;
  s.session_id = std::move(session_id);
  s.script_id = script_->id;
  s.script_version = script_->version;
  s.audience = audience;
  s.bindings = bindings;
  s.rng_seed = seed;
  for (const auto& v : script_->variables) s.variables[v.name] = v.initial.value_or(Value{});
  Runner run(*this, s);
  nlohmann::ordered_json p;
  p["network"] = script_->entry.network;
  p["via"] = "entry";
  run.emit(EventKind::network_enter, std::move(p));
  run.settle(script_->entry);
  return s;
}

std::vector<std::size_t> Engine::available_choices(const SessionState& session) const {
  if (session.finished) return {};
  SessionState copy = session;
  Runner run(*this, copy);
  const auto& st = run.state_at(session.current);
  if (st.riddle) return session.presented;
  return run.guard_filtered(st);
}

namespace {

std::vector<RenderedUtterance> render_pending(const SessionState& session) {
  std::vector<RenderedUtterance> out;
  for (const auto& u : session.pending) {
    RenderedUtterance r;
    r.text = u.text;
    r.content_tags = u.content_tags;
    if (!nvb::split_words(u.text).empty()) r.behaviors = nvb::annotate(u.text, u.emphasis, u.role);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

RenderStep Engine::closing_step(const SessionState& session) const {
  RenderStep step;
  step.utterances = render_pending(session);
  auto phase = script_->metadata.find("phase_" + session.current.network);
  step.progress = phase != script_->metadata.end() ? phase->second : session.current.network;
  return step;
}

RenderStep Engine::current_step(const SessionState& session) const {
  if (session.finished) throw Error(ErrorCode::SessionFinished, "session has finished");
  RenderStep step;
  step.utterances = render_pending(session);
  const auto* st = script_->find_state(session.current);
  if (!st) throw Error(ErrorCode::ReferenceError, "unknown state '" + to_string(session.current) + "'");
  if (st->riddle) {
    const auto* area = options_.forest ? options_.forest->find(st->riddle->area) : nullptr;
    if (!area || !area->riddle || !session.game)
      throw Error(ErrorCode::GameNotStarted, "riddle gate without an active game");
    for (std::size_t i = 0; i < session.presented.size(); ++i)
      step.choices.push_back({i, area->riddle->options[session.presented[i]]});
    RiddleView view;
    view.area = area->id;
    view.guardian = area->guardian;
    view.prompt = area->riddle->prompt;
    if (game::hint_visible(*session.game, *options_.forest, area->id)) view.hint = area->riddle->hint;
    view.unlocked.assign(session.game->unlocked.begin(), session.game->unlocked.end());
    view.role = game::to_string(session.game->role);
    step.riddle = std::move(view);
  } else {
    for (std::size_t i = 0; i < session.presented.size(); ++i)
      step.choices.push_back({i, st->choices[session.presented[i]].label});
  }
  auto phase = script_->metadata.find("phase_" + session.current.network);
  step.progress = phase != script_->metadata.end() ? phase->second : session.current.network;
  return step;
}

SessionState Engine::advance(const SessionState& session, std::size_t choice_index) const {
  SessionState next = session;
  Runner run(*this, next);
  run.take(choice_index);
  return next;
}

SessionState Engine::replay(Audience audience, const Bindings& bindings, std::uint64_t seed,
                            std::span<const std::size_t> choices, std::string session_id) const {
  auto s = start_session(audience, bindings, seed, std::move(session_id));
  for (std::size_t i = 0; i < choices.size(); ++i) {
    try {
      s = advance(s, choices[i]);
    } catch (const ReplayError&) {
      throw;
    } catch (const Error& e) {
      throw ReplayError(i, e);
    }
  }
  return s;
}

}  // namespace clara::engine
