#include "tracecause/errors.hpp"

namespace tracecause {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDimension: return "invalid-dimension";
    case ErrorCode::InvalidCount: return "invalid-count";
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::RankZero: return "rank-zero";
    case ErrorCode::SingularSystem: return "singular-system";
    case ErrorCode::UndefinedScore: return "undefined-score";
    case ErrorCode::UnstableEstimate: return "unstable-estimate";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

ErrorClass classify(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
    case ErrorCode::Parse:
      return ErrorClass::Io;
    case ErrorCode::RankZero:
    case ErrorCode::SingularSystem:
    case ErrorCode::UndefinedScore:
    case ErrorCode::UnstableEstimate:
      return ErrorClass::Numerical;
    default:
      return ErrorClass::Validation;
  }
}

}  // namespace tracecause
