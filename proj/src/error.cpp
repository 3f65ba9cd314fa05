#include "rdmatch/error.hpp"

namespace rdmatch {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidLevel: return "InvalidLevel";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ModelFormat: return "ModelFormat";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SplitTooSmall: return "SplitTooSmall";
    case ErrorCode::EmptyControlGroup: return "EmptyControlGroup";
    case ErrorCode::EmptyTreatedGroup: return "EmptyTreatedGroup";
    case ErrorCode::TooFewControls: return "TooFewControls";
    case ErrorCode::DegenerateCovariate: return "DegenerateCovariate";
    case ErrorCode::TooManyFailures: return "TooManyFailures";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient:
    case ErrorCode::SplitTooSmall:
    case ErrorCode::EmptyControlGroup:
    case ErrorCode::EmptyTreatedGroup:
    case ErrorCode::TooFewControls:
    case ErrorCode::DegenerateCovariate:
      return ErrorCategory::Numeric;
    case ErrorCode::TooManyFailures:
      return ErrorCategory::Bootstrap;
    default:
      return ErrorCategory::Input;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Error Error::with_context(std::string_view prefix) const {
  std::string msg(what());
  // strip our own "Code: " prefix so it is not repeated
  const auto tag = std::string(to_string(code_)) + ": ";
  if (msg.rfind(tag, 0) == 0) msg.erase(0, tag.size());
  return Error(code_, std::string(prefix) + ": " + msg);
}

}  // namespace rdmatch
