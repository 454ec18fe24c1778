#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clara/script/script.hpp"

namespace clara::script {

enum class IssueKind {
  structure,             // a document invariant is broken
  unreachable,           // state cannot be reached from the entry
  dead_end,              // non-terminal state with no outgoing path
  no_exit,               // sub-network cannot reach any terminal
  unsatisfiable_guard,   // guard is false under every variable assignment
  uncovered_content,     // registry tag missing from some stage-consistent complete path
  ambiguous_transition,  // more than one unconditional transition (declaration order wins)
};

enum class Severity { warning, error };

std::string_view to_string(IssueKind k);
std::string_view to_string(Severity s);

struct Issue {
  IssueKind kind;
  Severity severity;
  std::string network;
  std::string state;
  std::string detail;

  bool operator==(const Issue&) const = default;
};

struct ValidationReport {
  std::vector<Issue> issues;

  bool empty() const { return issues.empty(); }
  std::size_t count(IssueKind kind) const;
  bool has_errors() const;
};

nlohmann::json to_json(const ValidationReport& report);
std::string to_text(const ValidationReport& report);

struct ValidationOptions {
  /// Fixes the audience variable during guard analysis.
  std::optional<Audience> audience;
  /// Functions callable from guards; calls to functions missing here are assumed satisfiable.
  const FunctionTable* functions = nullptr;
  /// Content tag for each forest area named by a riddle gate.
  std::map<std::string, std::string> riddle_tags;
  /// Variable whose values partition paths for the content-coverage check.
  std::string split_variable = "stage";
};

/// Static analysis. An empty report means the script is well-formed.
ValidationReport validate_script(const DialogueScript& script, const ValidationOptions& options = {});

}  // namespace clara::script
