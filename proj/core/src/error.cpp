#include "clara/error.hpp"

namespace clara {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ReferenceError: return "ReferenceError";
    case ErrorCode::DuplicateIdError: return "DuplicateIdError";
    case ErrorCode::AudienceMismatch: return "AudienceMismatch";
    case ErrorCode::MissingBinding: return "MissingBinding";
    case ErrorCode::SessionFinished: return "SessionFinished";
    case ErrorCode::InvalidChoiceIndex: return "InvalidChoiceIndex";
    case ErrorCode::GuardRace: return "GuardRace";
    case ErrorCode::CallDepthExceeded: return "CallDepthExceeded";
    case ErrorCode::DeadSession: return "DeadSession";
    case ErrorCode::ImmutableVariable: return "ImmutableVariable";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::ReplayError: return "ReplayError";
    case ErrorCode::AreaNotAdjacent: return "AreaNotAdjacent";
    case ErrorCode::RiddleAlreadySolved: return "RiddleAlreadySolved";
    case ErrorCode::GameNotStarted: return "GameNotStarted";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::UnknownDyad: return "UnknownDyad";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::ArmViolation: return "ArmViolation";
    case ErrorCode::SessionExists: return "SessionExists";
    case ErrorCode::PhaseNotReached: return "PhaseNotReached";
    case ErrorCode::InvalidQuestion: return "InvalidQuestion";
    case ErrorCode::NoFinishedSession: return "NoFinishedSession";
    case ErrorCode::ReportImmutable: return "ReportImmutable";
    case ErrorCode::DeliveryFailure: return "DeliveryFailure";
    case ErrorCode::EndpointMisconfigured: return "EndpointMisconfigured";
    case ErrorCode::StorageError: return "StorageError";
    case ErrorCode::ItemCountMismatch: return "ItemCountMismatch";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ParseError::ParseError(ErrorCode code, std::size_t line, std::size_t column,
                       const std::string& message)
    : Error(code, std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

ReplayError::ReplayError(std::size_t position, const Error& cause)
    : Error(ErrorCode::ReplayError,
            "choice at position " + std::to_string(position) + " failed: " + cause.what()),
      position_(position),
      cause_(cause.code()) {}

}  // namespace clara
