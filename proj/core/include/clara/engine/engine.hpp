#pragma once

#include <functional>
#include <memory>
#include <span>

#include "clara/engine/session.hpp"
#include "clara/script/script.hpp"

namespace clara::engine {

using Bindings = std::map<std::string, std::string>;

struct EngineOptions {
  /// Functions callable from guards and assignments.
  script::FunctionTable functions;
  /// Area graph used by riddle gates; required only by scripts that contain them.
  std::shared_ptr<const game::Forest> forest;
  /// Timestamp source for transcript events.
  std::function<Clock::time_point()> clock;
  /// Bound on automatic transitions taken without user input in one step.
  std::size_t max_auto_steps = 10000;
};

/// Interprets one immutable script for any number of independent sessions.
/// Sessions are values: every operation returns a new SessionState.
class Engine {
 public:
  explicit Engine(std::shared_ptr<const script::DialogueScript> script, EngineOptions options = {});

  const script::DialogueScript& script() const { return *script_; }
  const EngineOptions& options() const { return options_; }

  /// Throws Error: AudienceMismatch, MissingBinding.
  SessionState start_session(Audience audience, const Bindings& bindings, std::uint64_t seed,
                             std::string session_id = "session") const;

  /// Pure. Throws Error(SessionFinished).
  RenderStep current_step(const SessionState& session) const;

  /// Final utterances of a session, with no choices. Valid whether or not the session finished.
  RenderStep closing_step(const SessionState& session) const;

  /// Takes the choice at `choice_index` of the presented list.
  /// Throws Error: SessionFinished, InvalidChoiceIndex, GuardRace, CallDepthExceeded,
  /// DeadSession, ImmutableVariable, OutOfRange, TypeError.
  SessionState advance(const SessionState& session, std::size_t choice_index) const;

  /// Folds advance over start_session. Throws ReplayError with the 0-based failing position.
  SessionState replay(Audience audience, const Bindings& bindings, std::uint64_t seed,
                      std::span<const std::size_t> choices, std::string session_id = "session") const;

  /// Guard-satisfied choices of the current state, as declaration indices.
  std::vector<std::size_t> available_choices(const SessionState& session) const;

 private:
  class Runner;

  std::shared_ptr<const script::DialogueScript> script_;
  EngineOptions options_;
};

}  // namespace clara::engine
