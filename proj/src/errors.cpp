#include "pathfx/errors.hpp"

#include <utility>

namespace pathfx {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::MissingCpt: return "MissingCpt";
    case ErrorCode::MissingMechanism: return "MissingMechanism";
    case ErrorCode::MissingNoise: return "MissingNoise";
    case ErrorCode::RowNotNormalized: return "RowNotNormalized";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::IncompleteMechanismTable: return "IncompleteMechanismTable";
    case ErrorCode::ValueOutOfDomain: return "ValueOutOfDomain";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::NotAPath: return "NotAPath";
    case ErrorCode::RepeatedNode: return "RepeatedNode";
    case ErrorCode::TooManyPaths: return "TooManyPaths";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::NonNumericDomain: return "NonNumericDomain";
    case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    case ErrorCode::RequiresScm: return "RequiresScm";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SemanticError: return "SemanticError";
  }
  return "UnknownError";
}

namespace {

std::string format_message(ErrorCode code, int line, int column,
                           const std::string& message) {
  std::string text = error_code_name(code);
  if (line > 0) {
    text += " at " + std::to_string(line) + ":" + std::to_string(column);
  }
  text += ": " + message;
  return text;
}

}  // namespace

Error::Error(ErrorCode code, std::string message)
    : std::runtime_error(format_message(code, 0, 0, message)), code_(code) {}

Error::Error(ErrorCode code, int line, int column, std::string message,
             std::optional<std::string> expected)
    : std::runtime_error(format_message(code, line, column, message)),
      code_(code),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

}  // namespace pathfx
