#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace emrecon {

enum class ErrorCode {
  NonConformingSpacing,
  DegenerateAxis,
  InnerNotContained,
  InvalidArgument,
  OutOfBounds,
  OutsideInner,
  ShapeMismatch,
  CflViolation,
  NonFinite,
  TraceMismatch,
  HistoryMismatch,
  DegenerateGradient,
  ClampContact,
  ZeroDenominator,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Exit status used by the CLI for each error category (0 is success).
int exit_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace emrecon
