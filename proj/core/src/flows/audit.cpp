#include "clara/flows/audit.hpp"

#include <set>

#include "clara/script/vocabulary.hpp"

namespace clara::flows {

using engine::EventKind;

namespace {

std::string effect_of(const engine::TranscriptEvent& e) {
  if (e.kind != EventKind::effect) return {};
  return e.payload.value("effect", std::string());
}

bool sets(const engine::TranscriptEvent& e, std::string_view var) {
  return effect_of(e) == "set" && e.payload.value("target", std::string()) == var;
}

}  // namespace

std::vector<AuditFinding> audit_permission_gate(const Transcript& t) {
  std::vector<AuditFinding> out;
  bool granted = false;
  for (const auto& e : t) {
    if (sets(e, script::kPermissionVariable) && e.payload.value("value", nlohmann::ordered_json()) == true)
      granted = true;
    if (!granted && e.kind == EventKind::utterance && !e.payload.value("tags", nlohmann::ordered_json::array()).empty())
      out.push_back({"permission_gate", e.seq, "educational content presented before permission was granted"});
  }
  return out;
}

std::vector<AuditFinding> audit_mi_ordering(const Transcript& t) {
  std::vector<AuditFinding> out;
  // rank of each MI milestone; each must follow all lower ranks
  int reached = 0;
  for (const auto& e : t) {
    int rank = 0;
    if (sets(e, "concern")) rank = 1;
    else if (sets(e, "validated")) rank = 2;
    else if (sets(e, "change_talk")) rank = 3;
    else if (effect_of(e) == "ruler") rank = 4;
    if (!rank) continue;
    if (rank > reached + 1)
      out.push_back({"mi_ordering", e.seq, "MI step " + std::to_string(rank) + " before step " + std::to_string(reached + 1)});
    if (rank > reached) reached = rank;
  }
  return out;
}

std::vector<AuditFinding> audit_stage_immutability(const Transcript& t) {
  std::vector<AuditFinding> out;
  int assignments = 0;
  for (const auto& e : t)
    if (sets(e, script::kStageVariable) && ++assignments > 1)
      out.push_back({"stage_immutability", e.seq, "stage assigned more than once"});
  return out;
}

std::vector<AuditFinding> audit_event_order(const Transcript& t) {
  std::vector<AuditFinding> out;
  std::uint64_t last = 0;
  const engine::TranscriptEvent* presented = nullptr;
  for (const auto& e : t) {
    if (e.seq <= last) out.push_back({"event_order", e.seq, "sequence number does not increase"});
    last = e.seq;
    if (e.kind == EventKind::choice_presented) presented = &e;
    if (e.kind == EventKind::choice_taken) {
      if (!presented) {
        out.push_back({"event_order", e.seq, "choice taken without a presented choice list"});
        continue;
      }
      const auto& choices = presented->payload["choices"];
      auto idx = e.payload.value("index", std::size_t{0});
      bool match = presented->payload.value("state", std::string()) == e.payload.value("state", std::string()) &&
                   idx < choices.size() && choices[idx]["label"] == e.payload["label"];
      if (!match) out.push_back({"event_order", e.seq, "choice taken does not match the presented list"});
      presented = nullptr;
    }
  }
  return out;
}

std::vector<AuditFinding> audit_stack_balance(const Transcript& t, bool finished) {
  std::vector<AuditFinding> out;
  std::vector<std::string> stack;
  for (const auto& e : t) {
    if (e.kind == EventKind::network_enter) stack.push_back(e.payload.value("network", std::string()));
    if (e.kind == EventKind::network_exit) {
      auto net = e.payload.value("network", std::string());
      if (stack.empty() || stack.back() != net) {
        out.push_back({"stack_balance", e.seq, "exit from '" + net + "' does not match the open network"});
        continue;
      }
      stack.pop_back();
    }
  }
  if (finished && !stack.empty())
    out.push_back({"stack_balance", 0, std::to_string(stack.size()) + " network(s) never exited"});
  return out;
}

std::vector<AuditFinding> audit_phase_order(const Transcript& t, const script::DialogueScript& script) {
  std::vector<AuditFinding> out;
  bool staged = false;
  bool coached = false;
  bool planned = false;
  std::set<script::NetworkKind> bodies;
  for (const auto& e : t) {
    if (sets(e, script::kStageVariable)) staged = true;
    if (e.kind != EventKind::network_enter) continue;
    auto net = script.find_network(e.payload.value("network", std::string()));
    if (!net) continue;
    switch (net->kind) {
      case script::NetworkKind::education:
      case script::NetworkKind::mi:
      case script::NetworkKind::game:
        if (!staged) out.push_back({"phase_order", e.seq, "'" + net->id + "' entered before staging"});
        if (coached) out.push_back({"phase_order", e.seq, "'" + net->id + "' entered after coaching"});
        bodies.insert(net->kind);
        break;
      case script::NetworkKind::coaching:
        coached = true;
        break;
      case script::NetworkKind::barriers:
        if (!coached) out.push_back({"phase_order", e.seq, "barriers entered before coaching"});
        planned = true;
        break;
      case script::NetworkKind::plumbing:
        break;
    }
  }
  if (bodies.size() > 1) out.push_back({"phase_order", 0, "more than one phase body entered"});
  if (planned && bodies.empty()) out.push_back({"phase_order", 0, "barriers reached without a phase body"});
  return out;
}

std::vector<AuditFinding> audit_session(const engine::SessionState& s, const script::DialogueScript& script) {
  std::vector<AuditFinding> out;
  for (auto part : {audit_permission_gate(s.transcript), audit_mi_ordering(s.transcript),
                    audit_stage_immutability(s.transcript), audit_event_order(s.transcript),
                    audit_stack_balance(s.transcript, s.finished), audit_phase_order(s.transcript, script)})
    out.insert(out.end(), part.begin(), part.end());
  return out;
}

}  // namespace clara::flows
