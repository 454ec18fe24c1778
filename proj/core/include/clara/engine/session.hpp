#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clara/domain.hpp"
#include "clara/game/forest.hpp"
#include "clara/nvb/annotator.hpp"
#include "clara/script/script.hpp"

namespace clara::engine {

using Clock = std::chrono::system_clock;

enum class EventKind { utterance, choice_presented, choice_taken, effect, network_enter, network_exit };

std::string_view to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view text);

struct TranscriptEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::utterance;
  nlohmann::ordered_json payload;
  Clock::time_point ts;

  /// Equality ignoring the timestamp.
  bool same_content(const TranscriptEvent& o) const { return seq == o.seq && kind == o.kind && payload == o.payload; }
};

struct Frame {
  std::string network;       // caller network
  std::string return_state;  // state entered in the caller when the callee finishes

  bool operator==(const Frame&) const = default;
};

/// Utterance emitted since the last choice, with slots already resolved.
struct PendingUtterance {
  std::string text;
  std::vector<std::string> content_tags;
  std::vector<std::size_t> emphasis;
  nvb::DiscourseRole role = nvb::DiscourseRole::new_information;

  bool operator==(const PendingUtterance&) const = default;
};

enum class FactStatus { presented, mastered, unmastered };

std::string_view to_string(FactStatus s);

struct SessionState {
  std::string session_id;
  std::string script_id;
  std::string script_version;
  Audience audience = Audience::parent;
  std::map<std::string, std::string> bindings;
  std::map<std::string, script::Value> variables;
  std::vector<Frame> call_stack;
  script::StateRef current;
  std::vector<TranscriptEvent> transcript;
  bool finished = false;
  std::uint64_t rng_seed = 0;

  std::vector<PendingUtterance> pending;
  /// Declaration indices of the choices offered at `current` (riddle answers for riddle gates).
  std::vector<std::size_t> presented;
  std::optional<game::GameProgress> game;
  std::map<std::string, FactStatus> facts;
  std::vector<std::string> warnings;

  /// Structural equality ignoring transcript timestamps.
  bool equivalent(const SessionState& o) const;

  std::optional<StageOfChange> stage() const;
  std::optional<std::int64_t> readiness() const;
};

nlohmann::json to_json(const script::Value& v);
script::Value value_from_json(const nlohmann::json& j);

/// Serializable snapshot; session_from_json(to_json(s)) reproduces s exactly.
nlohmann::json to_json(const SessionState& s);
SessionState session_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const TranscriptEvent& e, bool with_timestamp = true);

/// One event per line, fields in order seq, kind, payload, ts.
std::string transcript_jsonl(const std::vector<TranscriptEvent>& events, bool with_timestamps = true);

/// ISO-8601 UTC with milliseconds, e.g. 2024-05-01T09:30:00.000Z.
std::string iso_timestamp(Clock::time_point tp);
Clock::time_point parse_iso_timestamp(std::string_view text);

struct RenderedUtterance {
  std::string text;
  std::vector<nvb::BehaviorTag> behaviors;
  std::vector<std::string> content_tags;

  bool operator==(const RenderedUtterance&) const = default;
};

struct RenderChoice {
  std::size_t index = 0;
  std::string label;

  bool operator==(const RenderChoice&) const = default;
};

/// Game context for riddle gates, so a client can draw the forest screen.
struct RiddleView {
  std::string area;
  std::string guardian;
  std::string prompt;
  std::optional<std::string> hint;
  std::vector<std::string> unlocked;
  std::string role;

  bool operator==(const RiddleView&) const = default;
};

struct RenderStep {
  std::vector<RenderedUtterance> utterances;
  std::vector<RenderChoice> choices;
  std::string progress;
  std::optional<RiddleView> riddle;

  bool operator==(const RenderStep&) const = default;
};

nlohmann::ordered_json to_json(const RenderStep& step);

}  // namespace clara::engine
