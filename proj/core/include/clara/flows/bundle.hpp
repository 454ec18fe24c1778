#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "clara/engine/engine.hpp"
#include "clara/game/forest.hpp"
#include "clara/script/parser.hpp"
#include "clara/script/validator.hpp"

namespace clara::flows {

/// One row of the content registry: an educational fact and its knowledge-item truth value.
struct Fact {
  std::string tag;
  std::string statement;
  bool truth = true;

  bool operator==(const Fact&) const = default;
};

/// Tab-separated `tag statement truth` rows after a header line; truth is true/false.
/// Throws Error(InvalidRecord).
std::vector<Fact> parse_facts_tsv(std::string_view text);

/// Resolves `import <name>` to `<dir>/<name>.clara`.
script::ImportResolver directory_resolver(std::filesystem::path dir);

std::string read_file(const std::filesystem::path& path);

/// The shipped content: both audience scripts, the forest and the fact registry.
struct Bundle {
  std::filesystem::path dir;
  std::vector<Fact> facts;
  std::shared_ptr<const script::DialogueScript> parent;
  std::shared_ptr<const script::DialogueScript> adolescent;
  std::shared_ptr<const game::Forest> forest;

  const script::DialogueScript& script_for(Audience audience) const;
  std::shared_ptr<const script::DialogueScript> script_ptr(Audience audience) const;
  engine::EngineOptions engine_options() const;
  engine::Engine engine_for(Audience audience, std::function<engine::Clock::time_point()> clock = {}) const;
  script::ValidationOptions validation_options(Audience audience) const;
  /// Knowledge answer key in registry order.
  std::vector<bool> answer_key() const;
};

/// Loads parent.clara, adolescent.clara, forest.clara-game and facts.tsv from `dir`.
/// Throws ParseError for malformed documents and Error(InvalidRecord) when a script's
/// registry or the forest's riddle tags disagree with facts.tsv.
Bundle load_bundle(const std::filesystem::path& dir);

/// CLARA_BUNDLE_DIR when set, else the bundle directory baked in at build time.
std::filesystem::path default_bundle_dir();

}  // namespace clara::flows
