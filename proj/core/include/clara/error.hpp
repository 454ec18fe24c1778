#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace clara {

enum class ErrorCode {
  // script format
  SyntaxError,
  ReferenceError,
  DuplicateIdError,
  // dialogue engine
  AudienceMismatch,
  MissingBinding,
  SessionFinished,
  InvalidChoiceIndex,
  GuardRace,
  CallDepthExceeded,
  DeadSession,
  ImmutableVariable,
  OutOfRange,
  TypeError,
  ReplayError,
  // game
  AreaNotAdjacent,
  RiddleAlreadySolved,
  GameNotStarted,
  // annotator
  EmptyText,
  // dyad service
  UnknownDyad,
  UnknownSession,
  ArmViolation,
  SessionExists,
  PhaseNotReached,
  InvalidQuestion,
  NoFinishedSession,
  ReportImmutable,
  DeliveryFailure,
  EndpointMisconfigured,
  StorageError,
  // analytics
  ItemCountMismatch,
  DegenerateSample,
  InvalidRecord,
  // generic
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failures carry the 1-based source position of the offending token.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

/// Raised by replay when a choice in the sequence cannot be applied.
class ReplayError : public Error {
 public:
  ReplayError(std::size_t position, const Error& cause);

  std::size_t position() const noexcept { return position_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  std::size_t position_;
  ErrorCode cause_;
};

}  // namespace clara
