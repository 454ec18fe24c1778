#include "clara/script/script.hpp"

#include <algorithm>

namespace clara::script {

std::string_view to_string(NetworkKind k) {
  switch (k) {
    case NetworkKind::education: return "education";
    case NetworkKind::mi: return "mi";
    case NetworkKind::game: return "game";
    case NetworkKind::coaching: return "coaching";
    case NetworkKind::barriers: return "barriers";
    case NetworkKind::plumbing: return "plumbing";
  }
  return "?";
}

std::optional<NetworkKind> parse_network_kind(std::string_view text) {
  for (auto k : {NetworkKind::education, NetworkKind::mi, NetworkKind::game, NetworkKind::coaching,
                 NetworkKind::barriers, NetworkKind::plumbing})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

std::string to_string(const StateRef& r) { return r.network + "." + r.state; }

std::string_view to_string(EffectKind k) {
  switch (k) {
    case EffectKind::set: return "set";
    case EffectKind::flag: return "flag";
    case EffectKind::barrier: return "barrier";
    case EffectKind::ruler: return "ruler";
    case EffectKind::master: return "master";
    case EffectKind::unmaster: return "unmaster";
    case EffectKind::reteach: return "reteach";
    case EffectKind::role: return "role";
  }
  return "?";
}

const DialogueState* SubNetwork::find(std::string_view state_id) const {
  auto it = std::find_if(states.begin(), states.end(), [&](const auto& s) { return s.id == state_id; });
  return it == states.end() ? nullptr : &*it;
}

const DialogueState* SubNetwork::initial() const {
  auto it = std::find_if(states.begin(), states.end(), [](const auto& s) { return s.initial; });
  return it == states.end() ? nullptr : &*it;
}

const SubNetwork* DialogueScript::find_network(std::string_view net_id) const {
  auto it = std::find_if(networks.begin(), networks.end(), [&](const auto& n) { return n.id == net_id; });
  return it == networks.end() ? nullptr : &*it;
}

const DialogueState* DialogueScript::find_state(const StateRef& ref) const {
  auto net = find_network(ref.network);
  return net ? net->find(ref.state) : nullptr;
}

const VariableDecl* DialogueScript::find_variable(std::string_view name) const {
  auto it = std::find_if(variables.begin(), variables.end(), [&](const auto& v) { return v.name == name; });
  return it == variables.end() ? nullptr : &*it;
}

const SlotDecl* DialogueScript::find_slot(std::string_view name) const {
  auto it = std::find_if(slots.begin(), slots.end(), [&](const auto& s) { return s.name == name; });
  return it == slots.end() ? nullptr : &*it;
}

bool DialogueScript::has_fact(std::string_view tag) const {
  return std::find(facts.begin(), facts.end(), tag) != facts.end();
}

std::vector<std::string> template_slots(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string_view::npos) {
    auto close = text.find('}', pos + 1);
    if (close == std::string_view::npos) break;
    out.emplace_back(text.substr(pos + 1, close - pos - 1));
    pos = close + 1;
  }
  return out;
}

}  // namespace clara::script
