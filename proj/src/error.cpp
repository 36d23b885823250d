#include "emrecon/error.hpp"

namespace emrecon {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonConformingSpacing: return "NonConformingSpacing";
    case ErrorCode::DegenerateAxis: return "DegenerateAxis";
    case ErrorCode::InnerNotContained: return "InnerNotContained";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::OutsideInner: return "OutsideInner";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::TraceMismatch: return "TraceMismatch";
    case ErrorCode::HistoryMismatch: return "HistoryMismatch";
    case ErrorCode::DegenerateGradient: return "DegenerateGradient";
    case ErrorCode::ClampContact: return "ClampContact";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return 2;
    case ErrorCode::ValidationError: return 3;
    case ErrorCode::IoError: return 4;
    case ErrorCode::CflViolation: return 5;
    case ErrorCode::NonFinite: return 6;
    default: return 10;
  }
}

}  // namespace emrecon
