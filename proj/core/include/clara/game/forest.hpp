#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace clara::game {

enum class CharacterRole { Adventurer, Scientist, Mage, Warrior, Healer };

inline constexpr CharacterRole kAllRoles[] = {CharacterRole::Adventurer, CharacterRole::Scientist,
                                              CharacterRole::Mage, CharacterRole::Warrior,
                                              CharacterRole::Healer};

std::string_view to_string(CharacterRole r);
std::optional<CharacterRole> parse_role(std::string_view text);
/// Flavor text for the avatar; has no effect on play.
std::string_view role_descriptor(CharacterRole r);

struct Riddle {
  std::string id;
  std::string prompt;
  std::vector<std::string> options;
  std::size_t correct = 0;  // index into options
  std::string tag;          // content tag taught by the riddle
  std::string hint;

  bool operator==(const Riddle&) const = default;
};

struct Area {
  std::string id;
  std::string description;
  std::string guardian;
  std::vector<std::string> greetings;  // one is picked per session from the seed
  std::vector<std::string> exits;
  std::optional<Riddle> riddle;  // gate that unlocks this area

  bool operator==(const Area&) const = default;
};

struct Forest {
  std::string id;
  std::string start;
  std::string goal;
  std::vector<Area> areas;

  bool operator==(const Forest&) const = default;

  const Area* find(std::string_view area_id) const;
  /// Area gated by the riddle `riddle_id`, if any.
  const Area* area_of_riddle(std::string_view riddle_id) const;
  /// Riddle tags keyed by area id.
  std::map<std::string, std::string> riddle_tags() const;
};

/// Parses a `.clara-game` document:
///
///     forest <id> start=<area> goal=<area>
///     area <id>
///     text "<description>"
///     guardian "<creature>"
///     greet "<line>"
///     exits <area> [<area> ...]
///     riddle <id> correct=<k> tag=<fact>
///     prompt "<question>"
///     option "<answer>"
///     hint "<hint>"
///
/// `correct` is the 0-based option index. Statements after `area` apply to that area,
/// and prompt/option/hint to the most recent riddle.
/// Throws ParseError (SyntaxError, ReferenceError, DuplicateIdError).
Forest parse_forest(std::string_view source);

/// Graph invariants: goal reachable from start, exactly one riddle per non-start area,
/// none on the start area, valid correct indices, tags in `registry` when non-empty.
/// Returns human-readable problems; empty means valid.
std::vector<std::string> check_forest(const Forest& forest, const std::vector<std::string>& registry = {});

/// Tags whose gate lies on every start-to-goal path.
std::set<std::string> unavoidable_tags(const Forest& forest);

struct GameProgress {
  CharacterRole role = CharacterRole::Adventurer;
  std::set<std::string> unlocked;
  std::set<std::string> solved;                  // riddle ids
  std::map<std::string, std::uint32_t> attempts;  // riddle id -> answers given

  bool operator==(const GameProgress&) const = default;
};

/// Misses after which the riddle hint is surfaced. Retries are unlimited.
inline constexpr std::uint32_t kHintAfterMisses = 2;

GameProgress start_game(const Forest& forest, CharacterRole role);

/// Locked areas with an inbound edge from an unlocked area, in declaration order.
std::vector<std::string> frontier(const GameProgress& progress, const Forest& forest);

/// Answers the gate of `area_id`. Correct unlocks the area; incorrect only counts the attempt.
/// Throws Error: AreaNotAdjacent, RiddleAlreadySolved, InvalidChoiceIndex, ReferenceError.
GameProgress attempt_riddle(const GameProgress& progress, const Forest& forest, std::string_view area_id,
                            std::size_t answer);

/// True once the gate of `area_id` has been missed kHintAfterMisses times without being solved.
bool hint_visible(const GameProgress& progress, const Forest& forest, std::string_view area_id);

struct CompletionSummary {
  std::set<std::string> facts_mastered;
  std::map<std::string, std::uint32_t> attempts;
  std::uint32_t total_attempts = 0;
  bool complete = false;

  bool operator==(const CompletionSummary&) const = default;
};

CompletionSummary game_completion_summary(const GameProgress& progress, const Forest& forest);

/// Cosmetic guardian greeting chosen from the area's lines by `seed`.
std::string guardian_greeting(const Area& area, std::uint64_t seed);

}  // namespace clara::game
