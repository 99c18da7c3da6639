#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace pathfx {

enum class ErrorCode {
  DuplicateName,
  MissingCpt,
  MissingMechanism,
  MissingNoise,
  RowNotNormalized,
  CycleDetected,
  IncompleteMechanismTable,
  ValueOutOfDomain,
  UnknownVariable,
  UnknownNode,
  NotAPath,
  RepeatedNode,
  TooManyPaths,
  StateSpaceTooLarge,
  UnknownColumn,
  NonNumericDomain,
  ColumnMismatch,
  RequiresScm,
  ParseError,
  SemanticError,
};

const char* error_code_name(ErrorCode code);

// Every library failure surfaces as an Error. Errors raised while reading
// model text carry a 1-based source position; all others report line() == 0.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message);
  Error(ErrorCode code, int line, int column, std::string message,
        std::optional<std::string> expected = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::optional<std::string>& expected() const noexcept {
    return expected_;
  }

 private:
  ErrorCode code_;
  int line_ = 0;
  int column_ = 0;
  std::optional<std::string> expected_;
};

}  // namespace pathfx
