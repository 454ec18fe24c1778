#include "clara/script/validator.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "clara/error.hpp"
#include "clara/script/vocabulary.hpp"

namespace clara::script {

std::string_view to_string(IssueKind k) {
  switch (k) {
    case IssueKind::structure: return "structure";
    case IssueKind::unreachable: return "unreachable";
    case IssueKind::dead_end: return "dead_end";
    case IssueKind::no_exit: return "no_exit";
    case IssueKind::unsatisfiable_guard: return "unsatisfiable_guard";
    case IssueKind::uncovered_content: return "uncovered_content";
    case IssueKind::ambiguous_transition: return "ambiguous_transition";
  }
  return "?";
}

std::string_view to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

std::size_t ValidationReport::count(IssueKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(issues.begin(), issues.end(), [&](const Issue& i) { return i.kind == kind; }));
}

bool ValidationReport::has_errors() const {
  return std::any_of(issues.begin(), issues.end(), [](const Issue& i) { return i.severity == Severity::error; });
}

nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::ordered_json out;
  out["ok"] = report.empty();
  out["issues"] = nlohmann::ordered_json::array();
  for (const auto& i : report.issues) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(i.kind);
    j["severity"] = to_string(i.severity);
    j["network"] = i.network;
    j["state"] = i.state;
    j["detail"] = i.detail;
    out["issues"].push_back(std::move(j));
  }
  return nlohmann::json::parse(out.dump());
}

std::string to_text(const ValidationReport& report) {
  if (report.empty()) return "ok: no issues\n";
  std::ostringstream os;
  for (const auto& i : report.issues) {
    os << to_string(i.severity) << ' ' << to_string(i.kind);
    if (!i.network.empty()) os << ' ' << i.network;
    if (!i.state.empty()) os << '.' << i.state;
    os << ": " << i.detail << '\n';
  }
  return os.str();
}

namespace {

using Assignment = std::map<std::string, Value, std::less<>>;

struct UnknownFunction {};

class AssignmentContext : public EvalContext {
 public:
  AssignmentContext(const Assignment& values, const std::set<std::string, std::less<>>& variables,
                    const FunctionTable* functions)
      : values_(values), variables_(variables), functions_(functions) {}

  std::optional<Value> variable(std::string_view name) const override {
    if (auto it = values_.find(name); it != values_.end()) return it->second;
    if (variables_.count(name)) return Value{};
    return std::nullopt;
  }

  Value call(std::string_view name, std::span<const Value> args) const override {
    if (!functions_) throw UnknownFunction{};
    auto it = functions_->find(name);
    if (it == functions_->end()) throw UnknownFunction{};
    return it->second(args);
  }

 private:
  const Assignment& values_;
  const std::set<std::string, std::less<>>& variables_;
  const FunctionTable* functions_;
};

constexpr std::size_t kMaxAssignments = 200000;

class Validator {
 public:
  Validator(const DialogueScript& script, const ValidationOptions& options)
      : script_(script), options_(options) {
    for (const auto& v : script_.variables) variables_.insert(v.name);
    variables_.insert(std::string(kAudienceVariable));
    for (const auto& v : script_.variables)
      for (const auto& m : v.members) symbols_.insert(m);
    for (auto a : {Audience::parent, Audience::adolescent, Audience::both})
      symbols_.insert(std::string(to_string(a)));
  }

  ValidationReport run() {
    check_structure();
    check_guards();
    check_reachability();
    check_coverage();
    return std::move(report_);
  }

 private:
  void add(IssueKind kind, Severity sev, const std::string& net, const std::string& state, std::string detail) {
    report_.issues.push_back({kind, sev, net, state, std::move(detail)});
  }

  // ---- structure -----------------------------------------------------

  bool slot_declared(const std::string& name) const {
    return script_.find_slot(name) || script_.find_variable(name) || script_.metadata.count(name) > 0;
  }

  void check_expr(const Expr& e, const std::string& net, const std::string& st, bool boolean_position) {
    switch (e.kind) {
      case ExprKind::ident:
        if (boolean_position && !variables_.count(e.name))
          add(IssueKind::structure, Severity::error, net, st, "undeclared variable '" + e.name + "'");
        break;
      case ExprKind::call:
        if (options_.functions && !options_.functions->count(e.name))
          add(IssueKind::structure, Severity::error, net, st, "unknown function '" + e.name + "'");
        for (const auto& a : e.args) check_expr(a, net, st, false);
        break;
      case ExprKind::not_:
      case ExprKind::and_:
      case ExprKind::or_:
        for (const auto& a : e.args) check_expr(a, net, st, true);
        break;
      case ExprKind::compare: {
        check_compare_side(e.args[0], e.args[1], e.op, net, st);
        check_compare_side(e.args[1], e.args[0], e.op, net, st);
        for (const auto& a : e.args)
          if (a.kind != ExprKind::ident) check_expr(a, net, st, false);
        break;
      }
      default:
        break;
    }
  }

  void check_compare_side(const Expr& var_side, const Expr& other, CompareOp op, const std::string& net,
                          const std::string& st) {
    if (var_side.kind != ExprKind::ident) return;
    auto decl = script_.find_variable(var_side.name);
    if (!decl) {
      if (!variables_.count(var_side.name) && other.kind == ExprKind::ident && !variables_.count(other.name) &&
          !symbols_.count(var_side.name))
        add(IssueKind::structure, Severity::error, net, st,
            "comparison between undeclared identifiers '" + var_side.name + "' and '" + other.name + "'");
      return;
    }
    if (decl->type == VarType::enumeration && other.kind == ExprKind::ident && !variables_.count(other.name)) {
      if (std::find(decl->members.begin(), decl->members.end(), other.name) == decl->members.end())
        add(IssueKind::structure, Severity::error, net, st,
            "'" + other.name + "' is not a member of '" + decl->name + "'");
    }
    if (decl->type == VarType::integer && other.kind == ExprKind::ident && !variables_.count(other.name))
      add(IssueKind::structure, Severity::error, net, st,
          "integer variable '" + decl->name + "' compared with symbol '" + other.name + "'");
    const bool ordering = op != CompareOp::eq && op != CompareOp::ne;
    if (ordering && decl->type != VarType::integer)
      add(IssueKind::structure, Severity::error, net, st, "ordering comparison on non-integer '" + decl->name + "'");
  }

  void check_assignment(const Effect& e, const std::string& net, const std::string& st) {
    if (e.target == kAudienceVariable) {
      add(IssueKind::structure, Severity::error, net, st, "audience cannot be assigned");
      return;
    }
    auto decl = script_.find_variable(e.target);
    if (!decl) {
      add(IssueKind::structure, Severity::error, net, st, "assignment to undeclared variable '" + e.target + "'");
      return;
    }
    check_expr(e.value, net, st, false);
    const Expr& v = e.value;
    auto bad = [&] {
      add(IssueKind::structure, Severity::error, net, st,
          "value '" + to_source(v) + "' does not fit variable '" + decl->name + "'");
    };
    switch (decl->type) {
      case VarType::boolean:
        if (v.kind == ExprKind::literal && !std::holds_alternative<bool>(v.value)) bad();
        if (v.kind == ExprKind::ident && !variables_.count(v.name)) bad();
        break;
      case VarType::integer:
        if (v.kind == ExprKind::literal) {
          auto i = std::get_if<std::int64_t>(&v.value);
          if (!i || (decl->range && (*i < decl->range->first || *i > decl->range->second))) bad();
        }
        if (v.kind == ExprKind::ident && !variables_.count(v.name)) bad();
        break;
      case VarType::enumeration:
        if (v.kind == ExprKind::literal) bad();
        if (v.kind == ExprKind::ident && !variables_.count(v.name) &&
            std::find(decl->members.begin(), decl->members.end(), v.name) == decl->members.end())
          bad();
        break;
    }
  }

  void check_effect(const Effect& e, const std::string& net, const std::string& st) {
    switch (e.kind) {
      case EffectKind::set:
        check_assignment(e, net, st);
        break;
      case EffectKind::flag:
        if (!is_question_topic(e.target))
          add(IssueKind::structure, Severity::error, net, st, "unknown question topic '" + e.target + "'");
        if (e.text.empty()) add(IssueKind::structure, Severity::error, net, st, "empty flagged question");
        break;
      case EffectKind::barrier:
        if (!is_barrier_kind(e.target))
          add(IssueKind::structure, Severity::error, net, st, "unknown barrier kind '" + e.target + "'");
        break;
      case EffectKind::ruler: {
        check_expr(e.value, net, st, false);
        if (e.value.kind == ExprKind::literal) {
          auto i = std::get_if<std::int64_t>(&e.value.value);
          if (!i || *i < kRulerMin || *i > kRulerMax)
            add(IssueKind::structure, Severity::error, net, st, "readiness ruler value out of range");
        }
        if (!script_.find_variable(kReadinessVariable))
          add(IssueKind::structure, Severity::error, net, st, "ruler effect requires a 'readiness' variable");
        break;
      }
      case EffectKind::master:
      case EffectKind::unmaster:
      case EffectKind::reteach:
        if (!script_.has_fact(e.target))
          add(IssueKind::structure, Severity::error, net, st, "content tag '" + e.target + "' is not in the registry");
        break;
      case EffectKind::role:
        if (!is_character_role(e.target))
          add(IssueKind::structure, Severity::error, net, st, "unknown character role '" + e.target + "'");
        break;
    }
  }

  void check_structure() {
    auto cs = script_.metadata.find("content_source");
    if (cs == script_.metadata.end() || cs->second.empty())
      add(IssueKind::structure, Severity::error, "", "", "metadata must declare a non-empty content_source");
    for (const auto& v : script_.variables) {
      if (v.type == VarType::enumeration && v.members.empty())
        add(IssueKind::structure, Severity::error, "", "", "enumeration '" + v.name + "' has no members");
    }
    for (const auto& net : script_.networks) {
      auto initials = std::count_if(net.states.begin(), net.states.end(), [](const auto& s) { return s.initial; });
      if (initials != 1)
        add(IssueKind::structure, Severity::error, net.id, "",
            "network must have exactly one initial state (found " + std::to_string(initials) + ")");
      for (const auto& st : net.states) check_state(net, st);
    }
  }

  void check_state(const SubNetwork& net, const DialogueState& st) {
    auto err = [&](std::string msg) { add(IssueKind::structure, Severity::error, net.id, st.id, std::move(msg)); };
    if (st.terminal) {
      if (!st.choices.empty()) err("terminal state has choices");
      if (st.call) err("terminal state has a call");
      if (!st.transitions.empty()) err("terminal state has transitions");
      if (st.riddle) err("terminal state has a riddle gate");
    } else {
      const int exits = (st.choices.empty() ? 0 : 1) + (st.transitions.empty() ? 0 : 1) + (st.call ? 1 : 0) +
                        (st.riddle ? 1 : 0);
      if (exits == 0)
        add(IssueKind::dead_end, Severity::error, net.id, st.id, "non-terminal state has no choice, call or transition");
      else if (exits > 1)
        err("state mixes choices, transitions, calls and riddle gates");
    }
    auto unconditional = std::count_if(st.transitions.begin(), st.transitions.end(),
                                       [](const auto& t) { return !t.guard; });
    if (unconditional > 1)
      add(IssueKind::ambiguous_transition, Severity::warning, net.id, st.id,
          std::to_string(unconditional) + " unconditional transitions; the first declared is taken");
    for (const auto& u : st.utterances) {
      for (const auto& slot : template_slots(u.text))
        if (!slot_declared(slot)) err("template slot '{" + slot + "}' is not declared");
      for (const auto& tag : u.content_tags)
        if (!script_.has_fact(tag)) err("content tag '" + tag + "' is not in the registry");
    }
    for (const auto& e : st.on_enter) check_effect(e, net.id, st.id);
    for (const auto& ch : st.choices) {
      if (ch.guard) check_expr(*ch.guard, net.id, st.id, true);
      for (const auto& e : ch.effects) check_effect(e, net.id, st.id);
    }
    for (const auto& t : st.transitions)
      if (t.guard) check_expr(*t.guard, net.id, st.id, true);
    if (st.riddle && !options_.riddle_tags.empty() && !options_.riddle_tags.count(st.riddle->area))
      err("riddle gate names unknown area '" + st.riddle->area + "'");
  }

  // ---- guard analysis ------------------------------------------------

  std::vector<Value> domain(const std::string& name, const Expr& context_expr,
                            const std::map<std::string, Value>& fixed) const {
    if (auto it = fixed.find(name); it != fixed.end()) return {it->second};
    if (name == kAudienceVariable) {
      if (options_.audience) return {Value{std::string(to_string(*options_.audience))}};
      if (script_.audience != Audience::both) return {Value{std::string(to_string(script_.audience))}};
      return {Value{std::string("parent")}, Value{std::string("adolescent")}};
    }
    auto decl = script_.find_variable(name);
    std::vector<Value> out;
    if (!decl) return {Value{}};
    if (!decl->initial) out.emplace_back();
    switch (decl->type) {
      case VarType::boolean:
        out.emplace_back(false);
        out.emplace_back(true);
        break;
      case VarType::enumeration:
        for (const auto& m : decl->members) out.emplace_back(m);
        break;
      case VarType::integer: {
        std::set<std::int64_t> values;
        if (decl->range && decl->range->second - decl->range->first <= 64) {
          for (auto i = decl->range->first; i <= decl->range->second; ++i) values.insert(i);
        } else {
          collect_constants(context_expr, values);
          std::set<std::int64_t> widened;
          for (auto c : values) widened.insert({c - 1, c, c + 1});
          widened.insert(0);
          if (decl->range) {
            widened.insert({decl->range->first, decl->range->second});
            std::erase_if(widened, [&](auto v) { return v < decl->range->first || v > decl->range->second; });
          }
          values = std::move(widened);
        }
        for (auto v : values) out.emplace_back(v);
        break;
      }
    }
    return out;
  }

  static void collect_constants(const Expr& e, std::set<std::int64_t>& out) {
    if (e.kind == ExprKind::literal)
      if (auto i = std::get_if<std::int64_t>(&e.value)) out.insert(*i);
    for (const auto& a : e.args) collect_constants(a, out);
  }

  std::vector<std::string> referenced_variables(const std::vector<const Expr*>& exprs) const {
    std::set<std::string> ids;
    for (auto e : exprs) collect_identifiers(*e, ids);
    std::vector<std::string> out;
    for (const auto& id : ids)
      if (variables_.count(id)) out.push_back(id);
    return out;
  }

  /// Exists an assignment with every `must_fail` false and `must_hold` (if any) true.
  /// Returns true when undecidable (unknown function or too many assignments).
  bool satisfiable(const Expr* must_hold, const std::vector<const Expr*>& must_fail,
                   const std::map<std::string, Value>& fixed) const {
    std::vector<const Expr*> all = must_fail;
    if (must_hold) all.push_back(must_hold);
    if (all.empty()) return true;
    Expr combined;  // used only to harvest integer constants
    for (auto e : all) combined.args.push_back(*e);
    auto names = referenced_variables(all);
    std::vector<std::vector<Value>> domains;
    std::size_t total = 1;
    for (const auto& n : names) {
      domains.push_back(domain(n, combined, fixed));
      total *= domains.back().size();
      if (total > kMaxAssignments) return true;
    }
    Assignment values;
    std::vector<std::size_t> idx(names.size(), 0);
    try {
      while (true) {
        for (std::size_t i = 0; i < names.size(); ++i) values[names[i]] = domains[i][idx[i]];
        AssignmentContext ctx(values, variables_, options_.functions);
        bool ok = !must_hold || holds(*must_hold, ctx);
        for (auto e : must_fail) {
          if (!ok) break;
          ok = !holds(*e, ctx);
        }
        if (ok) return true;
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == domains[k].size()) idx[k++] = 0;
        if (k == idx.size()) return false;
      }
    } catch (const UnknownFunction&) {
      return true;
    } catch (const Error&) {
      return true;
    }
  }

  void check_guards() {
    const std::map<std::string, Value> none;
    for (const auto& net : script_.networks) {
      for (const auto& st : net.states) {
        for (const auto& ch : st.choices) {
          if (ch.guard && !satisfiable(&*ch.guard, {}, none))
            add(IssueKind::unsatisfiable_guard, Severity::error, net.id, st.id,
                "guard of choice \"" + ch.label + "\" can never hold: " + to_source(*ch.guard));
        }
        std::vector<const Expr*> earlier;
        bool has_unconditional = false;
        for (const auto& t : st.transitions) {
          if (!t.guard) {
            has_unconditional = true;
            continue;
          }
          if (!satisfiable(&*t.guard, {}, none))
            add(IssueKind::unsatisfiable_guard, Severity::error, net.id, st.id,
                "guard of transition to '" + t.target + "' can never hold: " + to_source(*t.guard));
          earlier.push_back(&*t.guard);
        }
        if (!st.transitions.empty() && !has_unconditional && satisfiable(nullptr, earlier, none))
          add(IssueKind::dead_end, Severity::error, net.id, st.id,
              "no transition applies for some variable assignments; add an unconditional fallback");
      }
    }
  }

  // ---- graph --------------------------------------------------------

  using Node = std::pair<std::size_t, std::size_t>;  // network index, state index

  struct Edges {
    std::vector<Node> local;                   // successors within the network
    std::optional<std::size_t> callee;         // network entered by a call
  };

  std::size_t network_index(const std::string& id) const {
    for (std::size_t i = 0; i < script_.networks.size(); ++i)
      if (script_.networks[i].id == id) return i;
    return script_.networks.size();
  }

  std::size_t state_index(std::size_t net, const std::string& id) const {
    const auto& states = script_.networks[net].states;
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i].id == id) return i;
    return states.size();
  }

  std::optional<std::size_t> initial_index(std::size_t net) const {
    const auto& states = script_.networks[net].states;
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i].initial) return i;
    return std::nullopt;
  }

  /// Successors of a state with guards evaluated under `fixed` (others free).
  Edges edges(std::size_t net, std::size_t st, const std::map<std::string, Value>& fixed) const {
    Edges out;
    const auto& s = script_.networks[net].states[st];
    for (const auto& ch : s.choices)
      if (!ch.guard || satisfiable(&*ch.guard, {}, fixed)) out.local.push_back({net, state_index(net, ch.target)});
    std::vector<const Expr*> earlier;
    for (const auto& t : s.transitions) {
      if (satisfiable(t.guard ? &*t.guard : nullptr, earlier, fixed))
        out.local.push_back({net, state_index(net, t.target)});
      if (!t.guard) break;
      earlier.push_back(&*t.guard);
    }
    if (s.riddle) {
      out.local.push_back({net, st});
      out.local.push_back({net, state_index(net, s.riddle->next)});
    }
    if (s.call) {
      out.callee = network_index(s.call->network);
      out.local.push_back({net, state_index(net, s.call->on_return)});
    }
    return out;
  }

  /// Which networks can reach a non-exit terminal from their initial state.
  std::vector<bool> returning_networks(const std::map<std::string, Value>& fixed) const {
    const auto n = script_.networks.size();
    std::vector<bool> returns(n, false);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (returns[i]) continue;
        auto init = initial_index(i);
        if (!init) continue;
        std::set<std::size_t> seen{*init};
        std::deque<std::size_t> queue{*init};
        while (!queue.empty() && !returns[i]) {
          auto s = queue.front();
          queue.pop_front();
          const auto& st = script_.networks[i].states[s];
          if (st.terminal && !st.exit) {
            returns[i] = true;
            break;
          }
          auto e = edges(i, s, fixed);
          for (auto [net, succ] : e.local) {
            if (e.callee && succ == state_index(i, st.call->on_return) && !(*e.callee < n && returns[*e.callee]))
              continue;
            if (seen.insert(succ).second) queue.push_back(succ);
          }
        }
        if (returns[i]) changed = true;
      }
    }
    return returns;
  }

  void check_reachability() {
    const std::map<std::string, Value> none;
    const auto returns = returning_networks(none);
    std::set<Node> seen;
    std::deque<Node> queue;
    auto entry_net = network_index(script_.entry.network);
    if (entry_net >= script_.networks.size()) return;
    Node start{entry_net, state_index(entry_net, script_.entry.state)};
    seen.insert(start);
    queue.push_back(start);
    while (!queue.empty()) {
      auto [net, st] = queue.front();
      queue.pop_front();
      const auto& s = script_.networks[net].states[st];
      auto e = edges(net, st, none);
      if (e.callee) {
        if (auto init = initial_index(*e.callee)) {
          Node n{*e.callee, *init};
          if (seen.insert(n).second) queue.push_back(n);
        }
      }
      for (auto n : e.local) {
        if (e.callee && n.second == state_index(net, s.call->on_return) && !returns[*e.callee]) continue;
        if (seen.insert(n).second) queue.push_back(n);
      }
      if (!s.terminal && e.local.empty() && !e.callee && !s.choices.empty())
        add(IssueKind::dead_end, Severity::error, script_.networks[net].id, s.id,
            "every outgoing choice is guarded by an unsatisfiable condition");
    }
    for (std::size_t i = 0; i < script_.networks.size(); ++i) {
      const auto& net = script_.networks[i];
      for (std::size_t s = 0; s < net.states.size(); ++s)
        if (!seen.count({i, s}))
          add(IssueKind::unreachable, Severity::warning, net.id, net.states[s].id, "state is unreachable from the entry");
      if (!initial_index(i)) continue;
      if (!reaches_terminal(i, *initial_index(i), none))
        add(IssueKind::no_exit, Severity::error, net.id, "", "no terminal state is reachable from the initial state");
    }
  }

  bool reaches_terminal(std::size_t net, std::size_t from, const std::map<std::string, Value>& fixed) const {
    std::set<std::size_t> seen{from};
    std::deque<std::size_t> queue{from};
    while (!queue.empty()) {
      auto s = queue.front();
      queue.pop_front();
      if (script_.networks[net].states[s].terminal) return true;
      for (auto [n, succ] : edges(net, s, fixed).local)
        if (seen.insert(succ).second) queue.push_back(succ);
    }
    return false;
  }

  // ---- content coverage ---------------------------------------------

  using TagSet = std::set<std::string>;

  TagSet tags_of(const DialogueState& st) const {
    TagSet out;
    for (const auto& u : st.utterances) out.insert(u.content_tags.begin(), u.content_tags.end());
    if (st.riddle)
      if (auto it = options_.riddle_tags.find(st.riddle->area); it != options_.riddle_tags.end())
        out.insert(it->second);
    return out;
  }

  static TagSet intersect(const TagSet& a, const TagSet& b) {
    TagSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.begin()));
    return out;
  }

  /// Tags presented on every path from a state to a returning terminal (greatest fixpoint).
  struct MustResult {
    std::vector<std::vector<std::optional<TagSet>>> per_state;  // nullopt: cannot complete
  };

  MustResult must_analysis(const std::map<std::string, Value>& fixed, const TagSet& universe) const {
    const auto n = script_.networks.size();
    std::vector<std::vector<Edges>> graph(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t s = 0; s < script_.networks[i].states.size(); ++s) graph[i].push_back(edges(i, s, fixed));

    MustResult r;
    r.per_state.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.per_state[i].assign(script_.networks[i].states.size(), std::nullopt);

    // completion (least fixpoint) before tag sets
    std::vector<std::vector<bool>> completes(n);
    for (std::size_t i = 0; i < n; ++i) completes[i].assign(script_.networks[i].states.size(), false);
    std::vector<bool> net_completes(n, false);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < script_.networks[i].states.size(); ++s) {
          if (completes[i][s]) continue;
          const auto& st = script_.networks[i].states[s];
          bool c = false;
          if (st.terminal) {
            c = !st.exit;
          } else if (st.call) {
            auto callee = graph[i][s].callee;
            auto ret = state_index(i, st.call->on_return);
            c = callee && *callee < n && net_completes[*callee] && completes[i][ret];
          } else {
            for (auto [net, succ] : graph[i][s].local)
              if (completes[i][succ]) c = true;
          }
          if (c) {
            completes[i][s] = true;
            changed = true;
          }
        }
        if (auto init = initial_index(i); init && completes[i][*init] && !net_completes[i]) {
          net_completes[i] = true;
          changed = true;
        }
      }
    }

    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t s = 0; s < script_.networks[i].states.size(); ++s)
        if (completes[i][s]) r.per_state[i][s] = universe;

    auto net_must = [&](std::size_t i) -> TagSet {
      auto init = initial_index(i);
      return init && r.per_state[i][*init] ? *r.per_state[i][*init] : universe;
    };

    changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < script_.networks[i].states.size(); ++s) {
          if (!r.per_state[i][s]) continue;
          const auto& st = script_.networks[i].states[s];
          TagSet next = tags_of(st);
          if (st.terminal) {
            // nothing follows
          } else if (st.call) {
            auto callee = *graph[i][s].callee;
            auto ret = state_index(i, st.call->on_return);
            auto inner = net_must(callee);
            next.insert(inner.begin(), inner.end());
            next.insert(r.per_state[i][ret]->begin(), r.per_state[i][ret]->end());
          } else {
            std::optional<TagSet> meet;
            for (auto [net, succ] : graph[i][s].local) {
              if (!r.per_state[i][succ]) continue;
              meet = meet ? intersect(*meet, *r.per_state[i][succ]) : *r.per_state[i][succ];
            }
            if (meet) next.insert(meet->begin(), meet->end());
          }
          next = intersect(next, universe);
          if (next != *r.per_state[i][s]) {
            r.per_state[i][s] = std::move(next);
            changed = true;
          }
        }
      }
    }
    return r;
  }

  void check_coverage() {
    if (script_.facts.empty()) return;
    TagSet universe(script_.facts.begin(), script_.facts.end());
    auto entry_net = network_index(script_.entry.network);
    if (entry_net >= script_.networks.size()) return;
    auto entry_state = state_index(entry_net, script_.entry.state);

    std::vector<std::map<std::string, Value>> partitions;
    const auto* split = script_.find_variable(options_.split_variable);
    if (split && split->type == VarType::enumeration) {
      for (const auto& m : split->members) partitions.push_back({{split->name, Value{m}}});
    } else {
      partitions.emplace_back();
    }
    for (const auto& fixed : partitions) {
      auto result = must_analysis(fixed, universe);
      const auto& must = result.per_state[entry_net][entry_state];
      if (!must) continue;
      std::string where;
      for (const auto& [k, v] : fixed) where = " when " + k + "=" + to_string(v);
      for (const auto& tag : script_.facts)
        if (!must->count(tag))
          add(IssueKind::uncovered_content, Severity::error, "", "",
              "content tag '" + tag + "' is not presented on every complete path" + where);
    }
  }

  const DialogueScript& script_;
  const ValidationOptions& options_;
  std::set<std::string, std::less<>> variables_;
  std::set<std::string> symbols_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate_script(const DialogueScript& script, const ValidationOptions& options) {
  return Validator(script, options).run();
}

}  // namespace clara::script
