#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace clara::script {

/// Runtime value of a session variable or guard sub-expression.
/// monostate means "unset"; enumeration members are carried as strings.
using Value = std::variant<std::monostate, bool, std::int64_t, std::string>;

std::string to_string(const Value& v);
bool is_unset(const Value& v);
bool truthy(const Value& v);

enum class CompareOp { eq, ne, lt, le, gt, ge };

enum class ExprKind {
  literal,  // value
  text,     // quoted string literal
  ident,    // variable, or an enumeration symbol when no such variable exists
  call,     // name(args...)
  not_,
  and_,
  or_,
  compare,  // args[0] op args[1]
};

/// Guard / assignment expression tree. Value type; compared structurally.
struct Expr {
  ExprKind kind = ExprKind::literal;
  Value value;
  std::string name;
  CompareOp op = CompareOp::eq;
  std::vector<Expr> args;

  bool operator==(const Expr&) const = default;

  static Expr literal(Value v);
  static Expr text(std::string s);
  static Expr ident(std::string n);
  static Expr call(std::string n, std::vector<Expr> a);
  static Expr negate(Expr e);
  static Expr both(Expr l, Expr r);
  static Expr either(Expr l, Expr r);
  static Expr compare(Expr l, CompareOp op, Expr r);
};

using Function = std::function<Value(std::span<const Value>)>;
using FunctionTable = std::map<std::string, Function, std::less<>>;

/// Resolution hooks used by evaluate().
class EvalContext {
 public:
  virtual ~EvalContext() = default;
  /// Value of a declared variable (possibly unset), or nullopt if `name` is not a variable.
  virtual std::optional<Value> variable(std::string_view name) const = 0;
  /// Throws clara::Error(ReferenceError) for unknown functions.
  virtual Value call(std::string_view name, std::span<const Value> args) const = 0;
};

/// Comparisons with an unset operand are false; mismatched types compare unequal.
Value evaluate(const Expr& e, const EvalContext& ctx);
bool holds(const Expr& e, const EvalContext& ctx);

/// Canonical source text; parse_expr(to_source(e)) == e.
std::string to_source(const Expr& e);

/// Every identifier that is not a call name.
void collect_identifiers(const Expr& e, std::set<std::string>& out);
void collect_calls(const Expr& e, std::set<std::string>& out);

std::string_view to_string(CompareOp op);

}  // namespace clara::script
