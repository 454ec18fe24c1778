#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clara/domain.hpp"
#include "clara/nvb/annotator.hpp"
#include "clara/script/expr.hpp"

namespace clara::script {

/// Maximum nesting of sub-network calls; keeps traversal finite.
inline constexpr std::size_t kMaxCallDepth = 16;

enum class NetworkKind { education, mi, game, coaching, barriers, plumbing };

std::string_view to_string(NetworkKind k);
std::optional<NetworkKind> parse_network_kind(std::string_view text);

struct StateRef {
  std::string network;
  std::string state;

  auto operator<=>(const StateRef&) const = default;
};

std::string to_string(const StateRef& r);

struct UtteranceSpec {
  std::string text;  // may contain {slot} placeholders
  std::vector<std::string> content_tags;
  std::vector<std::size_t> emphasis;  // word indices
  nvb::DiscourseRole role = nvb::DiscourseRole::new_information;

  bool operator==(const UtteranceSpec&) const = default;
};

enum class EffectKind {
  set,       // target = variable, value = expression
  flag,      // target = topic, text = curated question
  barrier,   // target = barrier kind
  ruler,     // value = readiness expression
  master,    // target = content tag
  unmaster,  // target = content tag
  reteach,   // target = content tag
  role,      // target = character role (starts the forest game)
};

std::string_view to_string(EffectKind k);

struct Effect {
  EffectKind kind = EffectKind::set;
  std::string target;
  Expr value;
  std::string text;

  bool operator==(const Effect&) const = default;
};

struct ChoiceSpec {
  std::string label;
  std::string target;  // state id within the owning network
  std::optional<Expr> guard;
  std::vector<Effect> effects;

  bool operator==(const ChoiceSpec&) const = default;
};

/// Automatic transition taken on entry; first satisfied one wins.
struct Transition {
  std::string target;
  std::optional<Expr> guard;

  bool operator==(const Transition&) const = default;
};

struct CallSpec {
  std::string network;
  std::string on_return;  // state id within the calling network

  bool operator==(const CallSpec&) const = default;
};

/// A forest-game riddle gate rendered by the engine from the area graph.
struct RiddleGate {
  std::string area;
  std::string next;

  bool operator==(const RiddleGate&) const = default;
};

struct DialogueState {
  std::string id;
  bool initial = false;
  bool terminal = false;
  bool exit = false;  // terminal that ends the whole session early (implies terminal)
  std::vector<UtteranceSpec> utterances;
  std::vector<Effect> on_enter;  // `assign` and `do` statements, in order
  std::vector<ChoiceSpec> choices;
  std::vector<Transition> transitions;
  std::optional<CallSpec> call;
  std::optional<RiddleGate> riddle;

  bool operator==(const DialogueState&) const = default;
};

struct SubNetwork {
  std::string id;
  NetworkKind kind = NetworkKind::plumbing;
  std::vector<DialogueState> states;

  bool operator==(const SubNetwork&) const = default;

  const DialogueState* find(std::string_view state_id) const;
  const DialogueState* initial() const;
};

enum class VarType { boolean, integer, enumeration };

struct VariableDecl {
  std::string name;
  VarType type = VarType::boolean;
  std::optional<std::pair<std::int64_t, std::int64_t>> range;  // integers only
  std::vector<std::string> members;                            // enumerations only
  std::optional<Value> initial;
  bool once = false;  // may be assigned at most once per session

  bool operator==(const VariableDecl&) const = default;
};

struct SlotDecl {
  std::string name;
  bool required = false;
  std::string fallback;

  bool operator==(const SlotDecl&) const = default;
};

struct DialogueScript {
  std::string id;
  std::string version;
  Audience audience = Audience::both;
  std::map<std::string, std::string> metadata;
  std::vector<VariableDecl> variables;
  std::vector<SlotDecl> slots;
  std::vector<std::string> facts;  // content-tag registry
  StateRef entry;
  std::vector<SubNetwork> networks;

  bool operator==(const DialogueScript&) const = default;

  const SubNetwork* find_network(std::string_view id) const;
  const DialogueState* find_state(const StateRef& ref) const;
  const VariableDecl* find_variable(std::string_view name) const;
  const SlotDecl* find_slot(std::string_view name) const;
  bool has_fact(std::string_view tag) const;
};

/// Name of the implicit variable holding the session audience.
inline constexpr std::string_view kAudienceVariable = "audience";

/// Template slot names in order of appearance ("{name}").
std::vector<std::string> template_slots(std::string_view text);

}  // namespace clara::script
