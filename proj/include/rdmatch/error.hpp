#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rdmatch {

enum class ErrorCode {
  // input validation
  MissingColumn,
  ParseError,
  NonFiniteValue,
  TooFewRows,
  DimensionMismatch,
  IndexOutOfRange,
  ArityMismatch,
  InvalidArgument,
  InvalidLevel,
  IoError,
  ModelFormat,
  // numeric / structural
  RankDeficient,
  SplitTooSmall,
  EmptyControlGroup,
  EmptyTreatedGroup,
  TooFewControls,
  DegenerateCovariate,
  // bootstrap
  TooManyFailures,
};

enum class ErrorCategory { Input, Numeric, Bootstrap };

std::string_view to_string(ErrorCode code);
ErrorCategory category(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

  /// Same error with `prefix: ` prepended to the message.
  Error with_context(std::string_view prefix) const;

 private:
  ErrorCode code_;
};

}  // namespace rdmatch
