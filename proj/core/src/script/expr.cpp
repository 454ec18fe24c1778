#include "clara/script/expr.hpp"

#include "clara/error.hpp"
#include "../text_util.hpp"

namespace clara::script {

std::string to_string(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "unset"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

bool is_unset(const Value& v) { return std::holds_alternative<std::monostate>(v); }

bool truthy(const Value& v) {
  if (auto b = std::get_if<bool>(&v)) return *b;
  if (auto i = std::get_if<std::int64_t>(&v)) return *i != 0;
  if (auto s = std::get_if<std::string>(&v)) return !s->empty();
  return false;
}

Expr Expr::literal(Value v) {
  Expr e;
  e.kind = ExprKind::literal;
  e.value = std::move(v);
  return e;
}

Expr Expr::text(std::string s) {
  Expr e;
  e.kind = ExprKind::text;
  e.value = std::move(s);
  return e;
}

Expr Expr::ident(std::string n) {
  Expr e;
  e.kind = ExprKind::ident;
  e.name = std::move(n);
  return e;
}

Expr Expr::call(std::string n, std::vector<Expr> a) {
  Expr e;
  e.kind = ExprKind::call;
  e.name = std::move(n);
  e.args = std::move(a);
  return e;
}

Expr Expr::negate(Expr inner) {
  Expr e;
  e.kind = ExprKind::not_;
  e.args.push_back(std::move(inner));
  return e;
}

Expr Expr::both(Expr l, Expr r) {
  Expr e;
  e.kind = ExprKind::and_;
  e.args.push_back(std::move(l));
  e.args.push_back(std::move(r));
  return e;
}

Expr Expr::either(Expr l, Expr r) {
  Expr e;
  e.kind = ExprKind::or_;
  e.args.push_back(std::move(l));
  e.args.push_back(std::move(r));
  return e;
}

Expr Expr::compare(Expr l, CompareOp op, Expr r) {
  Expr e;
  e.kind = ExprKind::compare;
  e.op = op;
  e.args.push_back(std::move(l));
  e.args.push_back(std::move(r));
  return e;
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::eq: return "==";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
  }
  return "?";
}

namespace {

bool compare_values(const Value& l, CompareOp op, const Value& r) {
  if (is_unset(l) || is_unset(r)) return false;
  if (l.index() != r.index()) return op == CompareOp::ne;
  switch (op) {
    case CompareOp::eq: return l == r;
    case CompareOp::ne: return l != r;
    default: break;
  }
  // ordering is defined on integers only
  auto li = std::get_if<std::int64_t>(&l);
  auto ri = std::get_if<std::int64_t>(&r);
  if (!li || !ri) return false;
  switch (op) {
    case CompareOp::lt: return *li < *ri;
    case CompareOp::le: return *li <= *ri;
    case CompareOp::gt: return *li > *ri;
    case CompareOp::ge: return *li >= *ri;
    default: return false;
  }
}

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::or_: return 1;
    case ExprKind::and_: return 2;
    case ExprKind::not_: return 3;
    case ExprKind::compare: return 4;
    default: return 5;
  }
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
  switch (e.kind) {
    case ExprKind::literal:
      out += to_string(e.value);
      break;
    case ExprKind::text:
      out += detail::quote(std::get<std::string>(e.value));
      break;
    case ExprKind::ident:
      out += e.name;
      break;
    case ExprKind::call:
      out += e.name;
      out += '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print(e.args[i], out);
      }
      out += ')';
      break;
    case ExprKind::not_:
      out += "not ";
      print_wrapped(e.args[0], precedence(e.args[0]) < 3, out);
      break;
    case ExprKind::and_:
    case ExprKind::or_: {
      const int p = precedence(e);
      print_wrapped(e.args[0], precedence(e.args[0]) < p, out);
      out += e.kind == ExprKind::and_ ? " and " : " or ";
      print_wrapped(e.args[1], precedence(e.args[1]) <= p, out);
      break;
    }
    case ExprKind::compare:
      print_wrapped(e.args[0], precedence(e.args[0]) < 5, out);
      out += ' ';
      out += to_string(e.op);
      out += ' ';
      print_wrapped(e.args[1], precedence(e.args[1]) < 5, out);
      break;
  }
}

}  // namespace

Value evaluate(const Expr& e, const EvalContext& ctx) {
  switch (e.kind) {
    case ExprKind::literal:
    case ExprKind::text:
      return e.value;
    case ExprKind::ident: {
      if (auto v = ctx.variable(e.name)) return *v;
      return Value{e.name};
    }
    case ExprKind::call: {
      std::vector<Value> args;
      args.reserve(e.args.size());
      for (const auto& a : e.args) args.push_back(evaluate(a, ctx));
      return ctx.call(e.name, args);
    }
    case ExprKind::not_:
      return !truthy(evaluate(e.args[0], ctx));
    case ExprKind::and_:
      return truthy(evaluate(e.args[0], ctx)) && truthy(evaluate(e.args[1], ctx));
    case ExprKind::or_:
      return truthy(evaluate(e.args[0], ctx)) || truthy(evaluate(e.args[1], ctx));
    case ExprKind::compare:
      return compare_values(evaluate(e.args[0], ctx), e.op, evaluate(e.args[1], ctx));
  }
  throw Error(ErrorCode::TypeError, "malformed expression");
}

bool holds(const Expr& e, const EvalContext& ctx) { return truthy(evaluate(e, ctx)); }

std::string to_source(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

void collect_identifiers(const Expr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::ident) out.insert(e.name);
  for (const auto& a : e.args) collect_identifiers(a, out);
}

void collect_calls(const Expr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::call) out.insert(e.name);
  for (const auto& a : e.args) collect_calls(a, out);
}

}  // namespace clara::script
