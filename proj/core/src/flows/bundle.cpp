#include "clara/flows/bundle.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "../text_util.hpp"
#include "clara/error.hpp"
#include "clara/flows/routing.hpp"

namespace clara::flows {

std::vector<Fact> parse_facts_tsv(std::string_view text) {
  std::vector<Fact> out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  bool header = true;
  for (const auto& raw : detail::split(text, '\n')) {
    ++line_no;
    auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      if (line.substr(0, 3) == "tag") continue;
    }
    auto cols = detail::split(line, '\t');
    if (cols.size() != 3)
      throw Error(ErrorCode::InvalidRecord, "facts line " + std::to_string(line_no) + ": expected 3 tab-separated columns");
    Fact f{std::string(detail::trim(cols[0])), std::string(detail::trim(cols[1])), true};
    auto truth = detail::trim(cols[2]);
    if (truth == "true") f.truth = true;
    else if (truth == "false") f.truth = false;
    else throw Error(ErrorCode::InvalidRecord, "facts line " + std::to_string(line_no) + ": truth must be true or false");
    if (!seen.insert(f.tag).second)
      throw Error(ErrorCode::InvalidRecord, "facts line " + std::to_string(line_no) + ": duplicate tag '" + f.tag + "'");
    out.push_back(std::move(f));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

script::ImportResolver directory_resolver(std::filesystem::path dir) {
  return [dir = std::move(dir)](std::string_view name) { return read_file(dir / (std::string(name) + ".clara")); };
}

const script::DialogueScript& Bundle::script_for(Audience audience) const { return *script_ptr(audience); }

std::shared_ptr<const script::DialogueScript> Bundle::script_ptr(Audience audience) const {
  if (audience == Audience::adolescent) return adolescent;
  if (audience == Audience::parent) return parent;
  throw Error(ErrorCode::AudienceMismatch, "bundles are per audience");
}

engine::EngineOptions Bundle::engine_options() const {
  engine::EngineOptions o;
  o.functions = builtin_functions();
  o.forest = forest;
  return o;
}

engine::Engine Bundle::engine_for(Audience audience, std::function<engine::Clock::time_point()> clock) const {
  auto o = engine_options();
  o.clock = std::move(clock);
  return engine::Engine(script_ptr(audience), std::move(o));
}

script::ValidationOptions Bundle::validation_options(Audience audience) const {
  static const script::FunctionTable functions = builtin_functions();
  script::ValidationOptions o;
  o.audience = audience;
  o.functions = &functions;
  if (forest) o.riddle_tags = forest->riddle_tags();
  return o;
}

std::vector<bool> Bundle::answer_key() const {
  std::vector<bool> key;
  for (const auto& f : facts) key.push_back(f.truth);
  return key;
}

namespace {

void check_registry(const script::DialogueScript& s, const std::vector<Fact>& facts) {
  std::set<std::string> a(s.facts.begin(), s.facts.end());
  std::set<std::string> b;
  for (const auto& f : facts) b.insert(f.tag);
  if (a != b)
    throw Error(ErrorCode::InvalidRecord, "script '" + s.id + "' content registry does not match facts.tsv");
}

}  // namespace

Bundle load_bundle(const std::filesystem::path& dir) {
  Bundle b;
  b.dir = dir;
  b.facts = parse_facts_tsv(read_file(dir / "facts.tsv"));
  auto resolver = directory_resolver(dir);
  b.parent = std::make_shared<const script::DialogueScript>(script::parse_script(read_file(dir / "parent.clara"), resolver));
  b.adolescent =
      std::make_shared<const script::DialogueScript>(script::parse_script(read_file(dir / "adolescent.clara"), resolver));
  b.forest = std::make_shared<const game::Forest>(game::parse_forest(read_file(dir / "forest.clara-game")));
  check_registry(*b.parent, b.facts);
  check_registry(*b.adolescent, b.facts);
  std::vector<std::string> tags;
  for (const auto& f : b.facts) tags.push_back(f.tag);
  auto problems = game::check_forest(*b.forest, tags);
  if (!problems.empty()) throw Error(ErrorCode::InvalidRecord, "forest: " + problems.front());
  return b;
}

std::filesystem::path default_bundle_dir() {
  if (const char* env = std::getenv("CLARA_BUNDLE_DIR"); env && *env) return env;
#ifdef CLARA_SOURCE_BUNDLE_DIR
  if (std::filesystem::exists(CLARA_SOURCE_BUNDLE_DIR)) return CLARA_SOURCE_BUNDLE_DIR;
#endif
#ifdef CLARA_INSTALL_BUNDLE_DIR
  return CLARA_INSTALL_BUNDLE_DIR;
#else
  return "bundles";
#endif
}

}  // namespace clara::flows
