#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "clara/script/script.hpp"

namespace clara::script {

/// Returns the source text of an imported document given its name.
using ImportResolver = std::function<std::string(std::string_view name)>;

/// Parses a dialogue-script document.
///
/// Statements (one per line, `#` starts a comment outside quotes):
///
///     script <id> [version=<v>] [audience=parent|adolescent|both]
///     meta <key> "<value>"
///     slot <name> [required | "<fallback>"]
///     var <name> bool | int [<lo>..<hi>] | enum <a>,<b>,... [= <literal>] [once]
///     fact <tag>
///     import <name>
///     entry <network>[.<state>]
///     network <id> kind=<education|mi|game|coaching|barriers|plumbing>
///     state <id> [initial] [terminal] [exit]
///     say "<text>" [tags=<a>,<b>] [role=<discourse role>] [emph=<i>,<j>]
///     choice "<label>" -> <state> [if <guard>] [do <effect>; ...]
///     goto <state> [if <guard>]
///     call <network> return <state>
///     assign <var>=<expr>
///     do <effect>; ...
///     riddle <area> -> <state>
///
/// Effects: `set <var>=<expr>`, `flag <topic> "<text>"`, `barrier <kind>`, `ruler <expr>`,
/// `master <tag>`, `unmaster <tag>`, `reteach <tag>`, `role <name>`.
///
/// Throws ParseError (SyntaxError, ReferenceError, DuplicateIdError) with line/column.
DialogueScript parse_script(std::string_view source, const ImportResolver& resolver = {});

/// Parses a standalone guard/assignment expression.
Expr parse_expr(std::string_view source);

/// Canonical text; parse_script(serialize_script(s)) == s for every valid script.
std::string serialize_script(const DialogueScript& script);

}  // namespace clara::script
