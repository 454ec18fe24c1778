#include "clara/game/forest.hpp"

#include <algorithm>
#include <charconv>
#include <deque>

#include "../lexer.hpp"
#include "clara/error.hpp"

namespace clara::game {

std::string_view to_string(CharacterRole r) {
  switch (r) {
    case CharacterRole::Adventurer: return "Adventurer";
    case CharacterRole::Scientist: return "Scientist";
    case CharacterRole::Mage: return "Mage";
    case CharacterRole::Warrior: return "Warrior";
    case CharacterRole::Healer: return "Healer";
  }
  return "?";
}

std::optional<CharacterRole> parse_role(std::string_view text) {
  for (auto r : kAllRoles)
    if (to_string(r) == text) return r;
  return std::nullopt;
}

std::string_view role_descriptor(CharacterRole r) {
  switch (r) {
    case CharacterRole::Adventurer: return "a traveler with a worn map and a lantern";
    case CharacterRole::Scientist: return "a curious mind with a satchel of notebooks";
    case CharacterRole::Mage: return "a robed figure with a glowing staff";
    case CharacterRole::Warrior: return "a sturdy fighter with a wooden shield";
    case CharacterRole::Healer: return "a gentle helper carrying herbs and bandages";
  }
  return "";
}

const Area* Forest::find(std::string_view area_id) const {
  auto it = std::find_if(areas.begin(), areas.end(), [&](const Area& a) { return a.id == area_id; });
  return it == areas.end() ? nullptr : &*it;
}

const Area* Forest::area_of_riddle(std::string_view riddle_id) const {
  auto it = std::find_if(areas.begin(), areas.end(),
                         [&](const Area& a) { return a.riddle && a.riddle->id == riddle_id; });
  return it == areas.end() ? nullptr : &*it;
}

std::map<std::string, std::string> Forest::riddle_tags() const {
  std::map<std::string, std::string> out;
  for (const auto& a : areas)
    if (a.riddle) out[a.id] = a.riddle->tag;
  return out;
}

namespace {

using detail::Token;

class Line {
 public:
  Line(std::vector<Token> tokens, std::size_t line) : tokens_(std::move(tokens)), line_(line) {}

  bool done() const { return pos_ >= tokens_.size(); }
  std::size_t line() const { return line_; }
  std::size_t column() const { return done() ? 1 : tokens_[pos_].column; }

  std::string word(std::string_view what) {
    if (done() || tokens_[pos_].kind != Token::Kind::word) fail("expected " + std::string(what));
    return tokens_[pos_++].text;
  }
  std::string text(std::string_view what) {
    if (done() || tokens_[pos_].kind != Token::Kind::string) fail("expected quoted " + std::string(what));
    return tokens_[pos_++].text;
  }
  /// key=value with a word value
  std::string keyed(std::string_view key) {
    auto k = word(key);
    if (k != key) fail("expected '" + std::string(key) + "='");
    if (done() || tokens_[pos_].kind != Token::Kind::op || tokens_[pos_].text != "=") fail("expected '='");
    ++pos_;
    return word(key);
  }
  void end() {
    if (!done()) fail("unexpected '" + tokens_[pos_].text + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(ErrorCode::SyntaxError, line_, column(), msg);
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

}  // namespace

Forest parse_forest(std::string_view source) {
  Forest forest;
  bool header = false;
  Area* area = nullptr;
  Riddle* riddle = nullptr;
  std::map<std::string, std::size_t> exits_line;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    auto nl = source.find('\n', pos);
    auto raw = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
    ++line_no;
    auto tokens = detail::tokenize(raw, line_no);
    if (tokens.empty()) continue;
    Line ln(std::move(tokens), line_no);
    auto verb = ln.word("statement");
    if (verb == "forest") {
      if (header) ln.fail("duplicate forest header");
      forest.id = ln.word("forest id");
      forest.start = ln.keyed("start");
      forest.goal = ln.keyed("goal");
      ln.end();
      header = true;
      continue;
    }
    if (!header) ln.fail("document must start with 'forest'");
    if (verb == "area") {
      auto col = ln.column();
      auto id = ln.word("area id");
      ln.end();
      if (forest.find(id)) throw ParseError(ErrorCode::DuplicateIdError, line_no, col, "duplicate area '" + id + "'");
      forest.areas.push_back(Area{id, {}, {}, {}, {}, {}});
      area = &forest.areas.back();
      riddle = nullptr;
      continue;
    }
    if (!area) ln.fail("'" + verb + "' outside an area");
    if (verb == "text") {
      area->description = ln.text("description");
    } else if (verb == "guardian") {
      area->guardian = ln.text("guardian");
    } else if (verb == "greet") {
      area->greetings.push_back(ln.text("greeting"));
    } else if (verb == "exits") {
      exits_line[area->id] = line_no;
      do {
        area->exits.push_back(ln.word("area id"));
      } while (!ln.done());
    } else if (verb == "riddle") {
      if (area->riddle) ln.fail("area '" + area->id + "' already has a riddle");
      Riddle r;
      auto col = ln.column();
      r.id = ln.word("riddle id");
      for (const auto& a : forest.areas)
        if (a.riddle && a.riddle->id == r.id)
          throw ParseError(ErrorCode::DuplicateIdError, line_no, col, "duplicate riddle '" + r.id + "'");
      auto k = ln.keyed("correct");
      auto [ptr, ec] = std::from_chars(k.data(), k.data() + k.size(), r.correct);
      if (ec != std::errc() || ptr != k.data() + k.size()) ln.fail("correct must be a non-negative integer");
      r.tag = ln.keyed("tag");
      area->riddle = std::move(r);
      riddle = &*area->riddle;
    } else if (verb == "prompt" || verb == "option" || verb == "hint") {
      if (!riddle) ln.fail("'" + verb + "' before 'riddle'");
      auto s = ln.text(verb);
      if (verb == "prompt") riddle->prompt = std::move(s);
      else if (verb == "option") riddle->options.push_back(std::move(s));
      else riddle->hint = std::move(s);
    } else {
      ln.fail("unknown statement '" + verb + "'");
    }
    ln.end();
  }
  if (!header) throw ParseError(ErrorCode::SyntaxError, 1, 1, "missing forest header");
  for (const auto& a : forest.areas) {
    for (const auto& e : a.exits)
      if (!forest.find(e))
        throw ParseError(ErrorCode::ReferenceError, exits_line[a.id], 1, "unknown area '" + e + "'");
    if (a.riddle && a.riddle->correct >= a.riddle->options.size())
      throw ParseError(ErrorCode::SyntaxError, exits_line[a.id], 1,
                       "riddle '" + a.riddle->id + "' correct index out of range");
  }
  if (!forest.find(forest.start)) throw ParseError(ErrorCode::ReferenceError, 1, 1, "unknown start area");
  if (!forest.find(forest.goal)) throw ParseError(ErrorCode::ReferenceError, 1, 1, "unknown goal area");
  return forest;
}

namespace {

bool reachable(const Forest& forest, std::string_view from, std::string_view to, std::string_view removed) {
  if (from == removed) return false;
  std::set<std::string> seen{std::string(from)};
  std::deque<std::string> queue{std::string(from)};
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    if (cur == to) return true;
    for (const auto& e : forest.find(cur)->exits)
      if (e != removed && seen.insert(e).second) queue.push_back(e);
  }
  return false;
}

}  // namespace

std::vector<std::string> check_forest(const Forest& forest, const std::vector<std::string>& registry) {
  std::vector<std::string> problems;
  if (!reachable(forest, forest.start, forest.goal, ""))
    problems.push_back("goal '" + forest.goal + "' is not reachable from start");
  for (const auto& a : forest.areas) {
    if (a.id == forest.start) {
      if (a.riddle) problems.push_back("start area '" + a.id + "' must not have a riddle");
      continue;
    }
    if (!a.riddle) {
      problems.push_back("area '" + a.id + "' has no riddle gate");
      continue;
    }
    const auto& r = *a.riddle;
    if (r.options.size() < 2) problems.push_back("riddle '" + r.id + "' needs at least two options");
    if (r.correct >= r.options.size()) problems.push_back("riddle '" + r.id + "' has no correct option");
    if (r.prompt.empty()) problems.push_back("riddle '" + r.id + "' has no prompt");
    if (!registry.empty() && std::find(registry.begin(), registry.end(), r.tag) == registry.end())
      problems.push_back("riddle '" + r.id + "' tag '" + r.tag + "' is not in the registry");
  }
  return problems;
}

std::set<std::string> unavoidable_tags(const Forest& forest) {
  std::set<std::string> out;
  if (!reachable(forest, forest.start, forest.goal, "")) return out;
  for (const auto& a : forest.areas)
    if (a.riddle && a.id != forest.start && !reachable(forest, forest.start, forest.goal, a.id))
      out.insert(a.riddle->tag);
  return out;
}

GameProgress start_game(const Forest& forest, CharacterRole role) {
  GameProgress p;
  p.role = role;
  p.unlocked.insert(forest.start);
  return p;
}

std::vector<std::string> frontier(const GameProgress& progress, const Forest& forest) {
  std::vector<std::string> out;
  for (const auto& a : forest.areas) {
    if (progress.unlocked.count(a.id)) continue;
    bool adjacent = std::any_of(progress.unlocked.begin(), progress.unlocked.end(), [&](const std::string& u) {
      auto src = forest.find(u);
      return src && std::find(src->exits.begin(), src->exits.end(), a.id) != src->exits.end();
    });
    if (adjacent) out.push_back(a.id);
  }
  return out;
}

GameProgress attempt_riddle(const GameProgress& progress, const Forest& forest, std::string_view area_id,
                            std::size_t answer) {
  const Area* area = forest.find(area_id);
  if (!area) throw Error(ErrorCode::ReferenceError, "unknown area '" + std::string(area_id) + "'");
  if (!area->riddle) throw Error(ErrorCode::ReferenceError, "area '" + area->id + "' has no riddle");
  const auto& r = *area->riddle;
  if (progress.solved.count(r.id)) throw Error(ErrorCode::RiddleAlreadySolved, "riddle '" + r.id + "' already solved");
  auto open = frontier(progress, forest);
  if (std::find(open.begin(), open.end(), area->id) == open.end())
    throw Error(ErrorCode::AreaNotAdjacent, "area '" + area->id + "' is not adjacent to an unlocked area");
  if (answer >= r.options.size())
    throw Error(ErrorCode::InvalidChoiceIndex, "answer " + std::to_string(answer) + " out of range");
  GameProgress next = progress;
  ++next.attempts[r.id];
  if (answer == r.correct) {
    next.solved.insert(r.id);
    next.unlocked.insert(area->id);
  }
  return next;
}

bool hint_visible(const GameProgress& progress, const Forest& forest, std::string_view area_id) {
  const Area* area = forest.find(area_id);
  if (!area || !area->riddle || progress.solved.count(area->riddle->id)) return false;
  auto it = progress.attempts.find(area->riddle->id);
  return it != progress.attempts.end() && it->second >= kHintAfterMisses;
}

CompletionSummary game_completion_summary(const GameProgress& progress, const Forest& forest) {
  CompletionSummary s;
  for (const auto& id : progress.solved)
    if (auto a = forest.area_of_riddle(id)) s.facts_mastered.insert(a->riddle->tag);
  s.attempts = progress.attempts;
  for (const auto& [id, n] : progress.attempts) s.total_attempts += n;
  s.complete = progress.unlocked.count(forest.goal) > 0;
  return s;
}

std::string guardian_greeting(const Area& area, std::uint64_t seed) {
  if (area.greetings.empty()) return area.guardian.empty() ? std::string() : area.guardian + " watches you.";
  // splitmix64 finalizer keeps nearby seeds from picking the same line
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return area.greetings[z % area.greetings.size()];
}

}  // namespace clara::game
