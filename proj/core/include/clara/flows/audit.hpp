#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clara/engine/session.hpp"
#include "clara/script/script.hpp"

namespace clara::flows {

struct AuditFinding {
  std::string rule;
  std::uint64_t seq = 0;  // offending event, 0 when not tied to one
  std::string detail;

  bool operator==(const AuditFinding&) const = default;
};

using Transcript = std::vector<engine::TranscriptEvent>;

/// No tagged educational utterance before `set permission=true`.
std::vector<AuditFinding> audit_permission_gate(const Transcript& t);

/// Concern elicitation, then validation, then change talk, then the readiness ruler.
std::vector<AuditFinding> audit_mi_ordering(const Transcript& t);

/// The stage variable is assigned at most once.
std::vector<AuditFinding> audit_stage_immutability(const Transcript& t);

/// Sequence numbers increase and every choice_taken answers the latest choice_presented.
std::vector<AuditFinding> audit_event_order(const Transcript& t);

/// In a finished transcript every network_enter has a matching network_exit.
std::vector<AuditFinding> audit_stack_balance(const Transcript& t, bool finished);

/// Staging precedes body content, exactly one body kind is entered, coaching precedes barriers.
std::vector<AuditFinding> audit_phase_order(const Transcript& t, const script::DialogueScript& script);

/// Every audit above.
std::vector<AuditFinding> audit_session(const engine::SessionState& s, const script::DialogueScript& script);

}  // namespace clara::flows
