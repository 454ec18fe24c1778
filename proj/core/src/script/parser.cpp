#include "clara/script/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "../lexer.hpp"
#include "../text_util.hpp"
#include "clara/error.hpp"

namespace clara::script {
namespace {

using detail::Token;
using detail::tokenize;

bool is_identifier(std::string_view s, bool allow_dash) {
  if (s.empty()) return false;
  auto first = static_cast<unsigned char>(s[0]);
  if (!std::isalpha(first) && s[0] != '_') return false;
  for (char c : s.substr(1)) {
    auto uc = static_cast<unsigned char>(c);
    if (!std::isalnum(uc) && c != '_' && !(allow_dash && c == '-')) return false;
  }
  return true;
}

bool is_reserved(std::string_view s) {
  static const std::set<std::string_view> words = {"and", "or", "not", "true", "false", "if", "do"};
  return words.count(s) > 0;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

class Cursor {
 public:
  Cursor(const std::vector<Token>& tokens, std::size_t line, std::size_t line_length)
      : tokens_(tokens), line_(line), end_column_(line_length + 1) {}

  bool at_end() const { return pos_ >= tokens_.size(); }
  const Token& peek() const {
    static const Token end_token{};
    return at_end() ? end_token : tokens_[pos_];
  }
  const Token* peek_ahead(std::size_t n) const {
    return pos_ + n < tokens_.size() ? &tokens_[pos_ + n] : nullptr;
  }
  Token next() {
    if (at_end()) fail("unexpected end of line");
    return tokens_[pos_++];
  }
  std::size_t column() const { return at_end() ? end_column_ : tokens_[pos_].column; }
  std::size_t line() const { return line_; }

  bool is_word(std::string_view w) const {
    return !at_end() && peek().kind == Token::Kind::word && peek().text == w;
  }
  bool is_op(std::string_view o) const {
    return !at_end() && peek().kind == Token::Kind::op && peek().text == o;
  }
  bool accept_word(std::string_view w) {
    if (!is_word(w)) return false;
    ++pos_;
    return true;
  }
  bool accept_op(std::string_view o) {
    if (!is_op(o)) return false;
    ++pos_;
    return true;
  }
  std::string expect_word(std::string_view what) {
    if (at_end() || peek().kind != Token::Kind::word) fail("expected " + std::string(what));
    return next().text;
  }
  std::string expect_id(std::string_view what, bool allow_dash = true) {
    auto col = column();
    auto w = expect_word(what);
    if (!is_identifier(w, allow_dash) || is_reserved(w))
      throw ParseError(ErrorCode::SyntaxError, line_, col, "invalid " + std::string(what) + " '" + w + "'");
    return w;
  }
  std::string expect_string(std::string_view what) {
    if (at_end() || peek().kind != Token::Kind::string) fail("expected quoted " + std::string(what));
    return next().text;
  }
  void expect_op(std::string_view o) {
    if (!accept_op(o)) fail("expected '" + std::string(o) + "'");
  }
  void expect_end() {
    if (!at_end()) fail("unexpected '" + peek().text + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(ErrorCode::SyntaxError, line_, column(), msg);
  }

 private:
  const std::vector<Token>& tokens_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t end_column_;
};

// ---- expressions -------------------------------------------------------

Expr parse_or(Cursor& c);

Expr parse_primary(Cursor& c) {
  if (c.at_end()) c.fail("expected expression");
  const Token& t = c.peek();
  if (t.kind == Token::Kind::string) return Expr::text(c.next().text);
  if (t.kind == Token::Kind::op) {
    if (c.accept_op("(")) {
      Expr inner = parse_or(c);
      c.expect_op(")");
      return inner;
    }
    c.fail("unexpected '" + t.text + "' in expression");
  }
  if (t.text == "true" || t.text == "false") return Expr::literal(c.next().text == "true");
  if (auto i = parse_int(t.text)) {
    c.next();
    return Expr::literal(*i);
  }
  auto name = c.expect_id("identifier", false);
  if (c.accept_op("(")) {
    std::vector<Expr> args;
    if (!c.accept_op(")")) {
      do {
        args.push_back(parse_or(c));
      } while (c.accept_op(","));
      c.expect_op(")");
    }
    return Expr::call(std::move(name), std::move(args));
  }
  return Expr::ident(std::move(name));
}

Expr parse_compare(Cursor& c) {
  Expr left = parse_primary(c);
  static const std::pair<std::string_view, CompareOp> ops[] = {
      {"==", CompareOp::eq}, {"!=", CompareOp::ne}, {"<=", CompareOp::le},
      {">=", CompareOp::ge}, {"<", CompareOp::lt},  {">", CompareOp::gt}};
  for (auto [text, op] : ops) {
    if (c.accept_op(text)) return Expr::compare(std::move(left), op, parse_primary(c));
  }
  return left;
}

Expr parse_not(Cursor& c) {
  if (c.accept_word("not")) return Expr::negate(parse_not(c));
  return parse_compare(c);
}

Expr parse_and(Cursor& c) {
  Expr left = parse_not(c);
  while (c.accept_word("and")) left = Expr::both(std::move(left), parse_not(c));
  return left;
}

Expr parse_or(Cursor& c) {
  Expr left = parse_and(c);
  while (c.accept_word("or")) left = Expr::either(std::move(left), parse_and(c));
  return left;
}

// ---- document ---------------------------------------------------------

struct PendingRef {
  enum class Kind { state, network } kind;
  std::string network;  // owning network for state refs
  std::string target;
  std::size_t line;
  std::size_t column;
};

struct Document {
  DialogueScript script;
  bool has_header = false;
  std::optional<std::pair<std::string, std::optional<std::string>>> entry;
  std::size_t entry_line = 0, entry_column = 0;
  std::vector<PendingRef> refs;
  std::vector<std::pair<std::string, std::size_t>> imports;  // name, line
};

class DocumentParser {
 public:
  DocumentParser(const ImportResolver& resolver, std::vector<std::string>& import_stack)
      : resolver_(resolver), import_stack_(import_stack) {}

  Document parse(std::string_view source) {
    if (!detail::is_valid_utf8(source))
      throw ParseError(ErrorCode::SyntaxError, 1, 1, "source is not valid UTF-8");
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= source.size()) {
      auto nl = source.find('\n', start);
      auto line = source.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
      ++line_no;
      parse_line(line, line_no);
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
    return std::move(doc_);
  }

 private:
  void parse_line(std::string_view line, std::size_t line_no) {
    auto tokens = tokenize(line, line_no);
    if (tokens.empty()) return;
    Cursor c(tokens, line_no, line.size());
    if (c.peek().kind != Token::Kind::word) c.fail("expected statement keyword");
    const std::string keyword = c.next().text;
    if (keyword == "script") parse_header(c);
    else if (keyword == "meta") parse_meta(c);
    else if (keyword == "slot") parse_slot(c);
    else if (keyword == "var") parse_var(c);
    else if (keyword == "fact") parse_fact(c);
    else if (keyword == "import") parse_import(c);
    else if (keyword == "entry") parse_entry(c);
    else if (keyword == "network") parse_network(c);
    else if (keyword == "state") parse_state(c);
    else if (keyword == "say") parse_say(c);
    else if (keyword == "choice") parse_choice(c);
    else if (keyword == "goto") parse_goto(c);
    else if (keyword == "call") parse_call(c);
    else if (keyword == "assign") parse_assign(c);
    else if (keyword == "do") parse_do(c);
    else if (keyword == "riddle") parse_riddle(c);
    else
      throw ParseError(ErrorCode::SyntaxError, line_no, tokens[0].column, "unknown statement '" + keyword + "'");
  }

  void parse_header(Cursor& c) {
    if (doc_.has_header) c.fail("duplicate script header");
    doc_.has_header = true;
    doc_.script.id = c.expect_id("script id");
    while (!c.at_end()) {
      auto col = c.column();
      auto key = c.expect_word("attribute");
      c.expect_op("=");
      auto value = c.expect_word("attribute value");
      if (key == "version") {
        doc_.script.version = value;
      } else if (key == "audience") {
        auto a = parse_audience(value);
        if (!a) throw ParseError(ErrorCode::SyntaxError, c.line(), col, "unknown audience '" + value + "'");
        doc_.script.audience = *a;
      } else {
        throw ParseError(ErrorCode::SyntaxError, c.line(), col, "unknown script attribute '" + key + "'");
      }
    }
  }

  void parse_meta(Cursor& c) {
    auto col = c.column();
    auto key = c.expect_id("metadata key");
    auto value = c.expect_string("metadata value");
    c.expect_end();
    if (!doc_.script.metadata.emplace(key, value).second)
      throw ParseError(ErrorCode::DuplicateIdError, c.line(), col, "duplicate metadata key '" + key + "'");
  }

  void parse_slot(Cursor& c) {
    auto col = c.column();
    SlotDecl slot;
    slot.name = c.expect_id("slot name", false);
    if (c.accept_word("required")) slot.required = true;
    else if (!c.at_end() && c.peek().kind == Token::Kind::string) slot.fallback = c.next().text;
    c.expect_end();
    if (doc_.script.find_slot(slot.name))
      throw ParseError(ErrorCode::DuplicateIdError, c.line(), col, "duplicate slot '" + slot.name + "'");
    doc_.script.slots.push_back(std::move(slot));
  }

  Value parse_literal_for(Cursor& c, const VariableDecl& decl) {
    auto col = c.column();
    auto word = c.expect_word("initial value");
    auto bad = [&] {
      throw ParseError(ErrorCode::SyntaxError, c.line(), col,
                       "initial value '" + word + "' does not match type of '" + decl.name + "'");
    };
    switch (decl.type) {
      case VarType::boolean:
        if (word != "true" && word != "false") bad();
        return word == "true";
      case VarType::integer: {
        auto i = parse_int(word);
        if (!i) bad();
        return *i;
      }
      case VarType::enumeration:
        if (std::find(decl.members.begin(), decl.members.end(), word) == decl.members.end()) bad();
        return word;
    }
    return {};
  }

  void parse_var(Cursor& c) {
    auto col = c.column();
    VariableDecl decl;
    decl.name = c.expect_id("variable name", false);
    auto type = c.expect_word("variable type");
    if (type == "bool") {
      decl.type = VarType::boolean;
    } else if (type == "int") {
      decl.type = VarType::integer;
      if (!c.at_end() && c.peek().kind == Token::Kind::word && c.peek().text.find("..") != std::string::npos) {
        auto rcol = c.column();
        auto text = c.next().text;
        auto dots = text.find("..");
        auto lo = parse_int(std::string_view(text).substr(0, dots));
        auto hi = parse_int(std::string_view(text).substr(dots + 2));
        if (!lo || !hi || *lo > *hi)
          throw ParseError(ErrorCode::SyntaxError, c.line(), rcol, "invalid range '" + text + "'");
        decl.range = std::make_pair(*lo, *hi);
      }
    } else if (type == "enum") {
      decl.type = VarType::enumeration;
      do {
        decl.members.push_back(c.expect_id("enumeration member", false));
      } while (c.accept_op(","));
    } else {
      c.fail("unknown variable type '" + type + "'");
    }
    if (c.accept_op("=")) decl.initial = parse_literal_for(c, decl);
    if (c.accept_word("once")) decl.once = true;
    c.expect_end();
    if (decl.name == kAudienceVariable || doc_.script.find_variable(decl.name))
      throw ParseError(ErrorCode::DuplicateIdError, c.line(), col, "duplicate variable '" + decl.name + "'");
    doc_.script.variables.push_back(std::move(decl));
  }

  void parse_fact(Cursor& c) {
    auto col = c.column();
    auto tag = c.expect_id("fact tag");
    c.expect_end();
    if (doc_.script.has_fact(tag))
      throw ParseError(ErrorCode::DuplicateIdError, c.line(), col, "duplicate fact '" + tag + "'");
    doc_.script.facts.push_back(tag);
  }

  void parse_import(Cursor& c) {
    auto name = c.expect_id("import name");
    c.expect_end();
    doc_.imports.emplace_back(name, c.line());
  }

  void parse_entry(Cursor& c) {
    if (doc_.entry) c.fail("duplicate entry statement");
    doc_.entry_line = c.line();
    doc_.entry_column = c.column();
    auto ref = c.expect_word("entry reference");
    c.expect_end();
    auto dot = ref.find('.');
    if (dot == std::string::npos) {
      doc_.entry = std::make_pair(ref, std::nullopt);
    } else {
      doc_.entry = std::make_pair(ref.substr(0, dot), std::optional<std::string>(ref.substr(dot + 1)));
    }
  }

  void parse_network(Cursor& c) {
    auto col = c.column();
    SubNetwork net;
    net.id = c.expect_id("network id");
    if (!c.accept_word("kind")) c.fail("expected kind=<kind>");
    c.expect_op("=");
    auto kcol = c.column();
    auto kind = c.expect_word("network kind");
    auto k = parse_network_kind(kind);
    if (!k) throw ParseError(ErrorCode::SyntaxError, c.line(), kcol, "unknown network kind '" + kind + "'");
    net.kind = *k;
    c.expect_end();
    if (doc_.script.find_network(net.id))
      throw ParseError(ErrorCode::DuplicateIdError, c.line(), col, "duplicate network '" + net.id + "'");
    doc_.script.networks.push_back(std::move(net));
    state_ = nullptr;
  }

  SubNetwork& current_network(Cursor& c) {
    if (doc_.script.networks.empty()) c.fail("state declared outside of a network");
    return doc_.script.networks.back();
  }

  DialogueState& current_state(Cursor& c) {
    if (!state_) c.fail("statement outside of a state block");
    return *state_;
  }

  void parse_state(Cursor& c) {
    auto& net = current_network(c);
    auto col = c.column();
    DialogueState st;
    st.id = c.expect_id("state id");
    while (!c.at_end()) {
      auto fcol = c.column();
      auto flag = c.expect_word("state flag");
      if (flag == "initial") st.initial = true;
      else if (flag == "terminal") st.terminal = true;
      else if (flag == "exit") st.exit = st.terminal = true;
      else throw ParseError(ErrorCode::SyntaxError, c.line(), fcol, "unknown state flag '" + flag + "'");
    }
    if (net.find(st.id))
      throw ParseError(ErrorCode::DuplicateIdError, c.line(), col,
                       "duplicate state '" + st.id + "' in network '" + net.id + "'");
    net.states.push_back(std::move(st));
    state_ = &net.states.back();
  }

  std::vector<std::string> parse_word_list(Cursor& c, std::string_view what) {
    std::vector<std::string> out;
    do {
      out.push_back(c.expect_word(what));
    } while (c.accept_op(","));
    return out;
  }

  void parse_say(Cursor& c) {
    auto& st = current_state(c);
    UtteranceSpec u;
    u.text = c.expect_string("utterance text");
    while (!c.at_end()) {
      auto col = c.column();
      auto key = c.expect_word("utterance attribute");
      c.expect_op("=");
      if (key == "tags") {
        auto vcol = c.column();
        for (auto& t : parse_word_list(c, "content tag")) {
          if (!is_identifier(t, true)) throw ParseError(ErrorCode::SyntaxError, c.line(), vcol, "invalid tag '" + t + "'");
          u.content_tags.push_back(t);
        }
      } else if (key == "role") {
        auto vcol = c.column();
        auto r = c.expect_word("discourse role");
        auto role = nvb::parse_discourse_role(r);
        if (!role) throw ParseError(ErrorCode::SyntaxError, c.line(), vcol, "unknown discourse role '" + r + "'");
        u.role = *role;
      } else if (key == "emph") {
        auto vcol = c.column();
        for (auto& w : parse_word_list(c, "word index")) {
          auto i = parse_int(w);
          if (!i || *i < 0) throw ParseError(ErrorCode::SyntaxError, c.line(), vcol, "invalid word index '" + w + "'");
          u.emphasis.push_back(static_cast<std::size_t>(*i));
        }
      } else {
        throw ParseError(ErrorCode::SyntaxError, c.line(), col, "unknown utterance attribute '" + key + "'");
      }
    }
    st.utterances.push_back(std::move(u));
  }

  void add_state_ref(Cursor& c, const std::string& target, std::size_t col) {
    doc_.refs.push_back({PendingRef::Kind::state, current_network(c).id, target, c.line(), col});
  }

  Effect parse_effect(Cursor& c) {
    Effect e;
    auto col = c.column();
    auto verb = c.expect_word("effect");
    if (verb == "set") {
      e.kind = EffectKind::set;
      e.target = c.expect_id("variable name", false);
      c.expect_op("=");
      e.value = parse_or(c);
    } else if (verb == "flag") {
      e.kind = EffectKind::flag;
      e.target = c.expect_id("question topic");
      e.text = c.expect_string("question text");
    } else if (verb == "barrier") {
      e.kind = EffectKind::barrier;
      e.target = c.expect_id("barrier kind");
    } else if (verb == "ruler") {
      e.kind = EffectKind::ruler;
      e.value = parse_or(c);
    } else if (verb == "master" || verb == "unmaster" || verb == "reteach") {
      e.kind = verb == "master" ? EffectKind::master
               : verb == "unmaster" ? EffectKind::unmaster
                                    : EffectKind::reteach;
      e.target = c.expect_id("content tag");
    } else if (verb == "role") {
      e.kind = EffectKind::role;
      e.target = c.expect_id("character role");
    } else {
      throw ParseError(ErrorCode::SyntaxError, c.line(), col, "unknown effect '" + verb + "'");
    }
    return e;
  }

  std::vector<Effect> parse_effects(Cursor& c) {
    std::vector<Effect> out;
    do {
      out.push_back(parse_effect(c));
    } while (c.accept_op(";"));
    return out;
  }

  void parse_choice(Cursor& c) {
    auto& st = current_state(c);
    ChoiceSpec ch;
    auto lcol = c.column();
    ch.label = c.expect_string("choice label");
    c.expect_op("->");
    auto tcol = c.column();
    ch.target = c.expect_id("target state");
    add_state_ref(c, ch.target, tcol);
    if (c.accept_word("if")) ch.guard = parse_or(c);
    if (c.accept_word("do")) ch.effects = parse_effects(c);
    c.expect_end();
    for (const auto& other : st.choices)
      if (other.label == ch.label)
        throw ParseError(ErrorCode::DuplicateIdError, c.line(), lcol, "duplicate choice label \"" + ch.label + "\"");
    st.choices.push_back(std::move(ch));
  }

  void parse_goto(Cursor& c) {
    auto& st = current_state(c);
    Transition t;
    auto tcol = c.column();
    t.target = c.expect_id("target state");
    add_state_ref(c, t.target, tcol);
    if (c.accept_word("if")) t.guard = parse_or(c);
    c.expect_end();
    st.transitions.push_back(std::move(t));
  }

  void parse_call(Cursor& c) {
    auto& st = current_state(c);
    if (st.call) c.fail("state already has a call");
    CallSpec call;
    auto ncol = c.column();
    call.network = c.expect_id("network id");
    doc_.refs.push_back({PendingRef::Kind::network, "", call.network, c.line(), ncol});
    if (!c.accept_word("return")) c.fail("expected 'return <state>'");
    auto rcol = c.column();
    call.on_return = c.expect_id("return state");
    add_state_ref(c, call.on_return, rcol);
    c.expect_end();
    st.call = std::move(call);
  }

  void parse_assign(Cursor& c) {
    auto& st = current_state(c);
    Effect e;
    e.kind = EffectKind::set;
    e.target = c.expect_id("variable name", false);
    c.expect_op("=");
    e.value = parse_or(c);
    c.expect_end();
    st.on_enter.push_back(std::move(e));
  }

  void parse_do(Cursor& c) {
    auto& st = current_state(c);
    for (auto& e : parse_effects(c)) st.on_enter.push_back(std::move(e));
    c.expect_end();
  }

  void parse_riddle(Cursor& c) {
    auto& st = current_state(c);
    if (st.riddle) c.fail("state already has a riddle");
    RiddleGate r;
    r.area = c.expect_id("area id");
    c.expect_op("->");
    auto tcol = c.column();
    r.next = c.expect_id("target state");
    add_state_ref(c, r.next, tcol);
    c.expect_end();
    st.riddle = std::move(r);
  }

  const ImportResolver& resolver_;
  std::vector<std::string>& import_stack_;
  Document doc_;
  DialogueState* state_ = nullptr;
};

void merge_import(Document& into, Document&& imported, const std::string& name, std::size_t line) {
  auto fail = [&](const std::string& msg) {
    throw ParseError(ErrorCode::DuplicateIdError, line, 1, "import '" + name + "': " + msg);
  };
  for (auto& net : imported.script.networks) {
    if (into.script.find_network(net.id)) fail("duplicate network '" + net.id + "'");
    into.script.networks.push_back(std::move(net));
  }
  for (auto& v : imported.script.variables) {
    if (auto existing = into.script.find_variable(v.name)) {
      if (!(*existing == v)) fail("conflicting declaration of variable '" + v.name + "'");
      continue;
    }
    into.script.variables.push_back(std::move(v));
  }
  for (auto& s : imported.script.slots) {
    if (auto existing = into.script.find_slot(s.name)) {
      if (!(*existing == s)) fail("conflicting declaration of slot '" + s.name + "'");
      continue;
    }
    into.script.slots.push_back(std::move(s));
  }
  for (auto& f : imported.script.facts)
    if (!into.script.has_fact(f)) into.script.facts.push_back(std::move(f));
  for (auto& [k, v] : imported.script.metadata) into.script.metadata.emplace(k, v);
  for (auto& r : imported.refs) into.refs.push_back(std::move(r));
}

Document parse_document(std::string_view source, const ImportResolver& resolver,
                        std::vector<std::string>& import_stack) {
  Document doc = DocumentParser(resolver, import_stack).parse(source);
  auto imports = doc.imports;
  for (const auto& [name, line] : imports) {
    if (!resolver) throw ParseError(ErrorCode::ReferenceError, line, 1, "no resolver for import '" + name + "'");
    if (std::find(import_stack.begin(), import_stack.end(), name) != import_stack.end())
      throw ParseError(ErrorCode::ReferenceError, line, 1, "import cycle through '" + name + "'");
    std::string text;
    try {
      text = resolver(name);
    } catch (const std::exception& ex) {
      throw ParseError(ErrorCode::ReferenceError, line, 1, "cannot resolve import '" + name + "': " + ex.what());
    }
    import_stack.push_back(name);
    Document sub;
    try {
      sub = parse_document(text, resolver, import_stack);
    } catch (const ParseError& pe) {
      throw ParseError(pe.code(), pe.line(), pe.column(), "in import '" + name + "': " + pe.detail());
    }
    import_stack.pop_back();
    merge_import(doc, std::move(sub), name, line);
  }
  return doc;
}

void resolve_references(Document& doc) {
  auto& script = doc.script;
  for (const auto& ref : doc.refs) {
    if (ref.kind == PendingRef::Kind::network) {
      if (!script.find_network(ref.target))
        throw ParseError(ErrorCode::ReferenceError, ref.line, ref.column,
                         "unknown network '" + ref.target + "'");
    } else {
      auto net = script.find_network(ref.network);
      if (!net || !net->find(ref.target))
        throw ParseError(ErrorCode::ReferenceError, ref.line, ref.column,
                         "unknown state '" + ref.target + "' in network '" + ref.network + "'");
    }
  }
  if (!doc.entry) throw ParseError(ErrorCode::SyntaxError, 1, 1, "missing entry statement");
  const auto& [net_id, state_id] = *doc.entry;
  auto net = script.find_network(net_id);
  if (!net)
    throw ParseError(ErrorCode::ReferenceError, doc.entry_line, doc.entry_column,
                     "unknown entry network '" + net_id + "'");
  if (state_id) {
    if (!net->find(*state_id))
      throw ParseError(ErrorCode::ReferenceError, doc.entry_line, doc.entry_column,
                       "unknown entry state '" + *state_id + "'");
    script.entry = {net_id, *state_id};
  } else {
    auto init = net->initial();
    if (!init)
      throw ParseError(ErrorCode::ReferenceError, doc.entry_line, doc.entry_column,
                       "entry network '" + net_id + "' has no initial state");
    script.entry = {net_id, init->id};
  }
}

// ---- serialization -------------------------------------------------------

std::string value_literal(const Value& v) { return to_string(v); }

std::string effect_source(const Effect& e) {
  switch (e.kind) {
    case EffectKind::set: return "set " + e.target + "=" + to_source(e.value);
    case EffectKind::flag: return "flag " + e.target + " " + detail::quote(e.text);
    case EffectKind::barrier: return "barrier " + e.target;
    case EffectKind::ruler: return "ruler " + to_source(e.value);
    case EffectKind::master: return "master " + e.target;
    case EffectKind::unmaster: return "unmaster " + e.target;
    case EffectKind::reteach: return "reteach " + e.target;
    case EffectKind::role: return "role " + e.target;
  }
  return {};
}

template <typename T>
std::string join_numbers(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

}  // namespace

DialogueScript parse_script(std::string_view source, const ImportResolver& resolver) {
  std::vector<std::string> import_stack;
  Document doc = parse_document(source, resolver, import_stack);
  if (!doc.has_header) throw ParseError(ErrorCode::SyntaxError, 1, 1, "missing script header");
  resolve_references(doc);
  return std::move(doc.script);
}

Expr parse_expr(std::string_view source) {
  auto tokens = tokenize(source, 1);
  Cursor c(tokens, 1, source.size());
  Expr e = parse_or(c);
  c.expect_end();
  return e;
}

std::string serialize_script(const DialogueScript& s) {
  std::string out;
  auto line = [&](const std::string& text, int indent = 0) {
    out.append(static_cast<std::size_t>(indent), ' ');
    out += text;
    out += '\n';
  };
  std::string header = "script " + s.id;
  if (!s.version.empty()) header += " version=" + s.version;
  header += " audience=" + std::string(to_string(s.audience));
  line(header);
  for (const auto& [k, v] : s.metadata) line("meta " + k + " " + detail::quote(v));
  for (const auto& slot : s.slots) {
    std::string text = "slot " + slot.name;
    if (slot.required) text += " required";
    else if (!slot.fallback.empty()) text += " " + detail::quote(slot.fallback);
    line(text);
  }
  for (const auto& v : s.variables) {
    std::string text = "var " + v.name;
    switch (v.type) {
      case VarType::boolean: text += " bool"; break;
      case VarType::integer:
        text += " int";
        if (v.range) text += " " + std::to_string(v.range->first) + ".." + std::to_string(v.range->second);
        break;
      case VarType::enumeration: text += " enum " + detail::join(v.members, ","); break;
    }
    if (v.initial) text += " = " + value_literal(*v.initial);
    if (v.once) text += " once";
    line(text);
  }
  for (const auto& f : s.facts) line("fact " + f);
  line("entry " + s.entry.network + "." + s.entry.state);
  for (const auto& net : s.networks) {
    out += '\n';
    line("network " + net.id + " kind=" + std::string(to_string(net.kind)));
    for (const auto& st : net.states) {
      std::string head = "state " + st.id;
      if (st.initial) head += " initial";
      if (st.exit) head += " exit";
      else if (st.terminal) head += " terminal";
      line(head);
      for (const auto& u : st.utterances) {
        std::string text = "say " + detail::quote(u.text);
        if (!u.content_tags.empty()) text += " tags=" + detail::join(u.content_tags, ",");
        if (u.role != nvb::DiscourseRole::new_information) text += " role=" + std::string(nvb::to_string(u.role));
        if (!u.emphasis.empty()) text += " emph=" + join_numbers(u.emphasis);
        line(text, 2);
      }
      for (const auto& e : st.on_enter) {
        if (e.kind == EffectKind::set) line("assign " + e.target + "=" + to_source(e.value), 2);
        else line("do " + effect_source(e), 2);
      }
      if (st.call) line("call " + st.call->network + " return " + st.call->on_return, 2);
      if (st.riddle) line("riddle " + st.riddle->area + " -> " + st.riddle->next, 2);
      for (const auto& t : st.transitions) {
        std::string text = "goto " + t.target;
        if (t.guard) text += " if " + to_source(*t.guard);
        line(text, 2);
      }
      for (const auto& ch : st.choices) {
        std::string text = "choice " + detail::quote(ch.label) + " -> " + ch.target;
        if (ch.guard) text += " if " + to_source(*ch.guard);
        if (!ch.effects.empty()) {
          text += " do ";
          for (std::size_t i = 0; i < ch.effects.size(); ++i) {
            if (i) text += "; ";
            text += effect_source(ch.effects[i]);
          }
        }
        line(text, 2);
      }
    }
  }
  return out;
}

}  // namespace clara::script
