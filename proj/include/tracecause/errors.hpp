#pragma once

#include <stdexcept>
#include <string>

namespace tracecause {

enum class ErrorCode {
  InvalidDimension,
  InvalidCount,
  InvalidParameter,
  Shape,
  RankZero,
  SingularSystem,
  UndefinedScore,
  UnstableEstimate,
  Parse,
  Io,
};

// Coarse grouping used for process exit codes.
enum class ErrorClass { Validation, Io, Numerical };

const char* to_string(ErrorCode code);
ErrorClass classify(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tracecause
