#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qns {

enum class ErrorCode {
  InvalidParams,
  OrderMissing,
  AmplitudeCap,
  InvalidN,
  Overlap,
  ScalingTooLarge,
  GridEmpty,
  PulseOverlap,
  EmptyComb,
  GridMismatch,
  ProbabilityRange,
  DegenerateBand,
  SingularSystem,
  IllConditioned,
  Validation,
};

std::string_view to_string(ErrorCode code);

// Validation-type failures (bad input, bad configuration) versus numerical
// failures discovered while computing. The CLI maps these to exit codes 2 and 3.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::OrderMissing: return "OrderMissing";
    case ErrorCode::AmplitudeCap: return "AmplitudeCap";
    case ErrorCode::InvalidN: return "InvalidN";
    case ErrorCode::Overlap: return "Overlap";
    case ErrorCode::ScalingTooLarge: return "ScalingTooLarge";
    case ErrorCode::GridEmpty: return "GridEmpty";
    case ErrorCode::PulseOverlap: return "PulseOverlap";
    case ErrorCode::EmptyComb: return "EmptyComb";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ProbabilityRange: return "ProbabilityRange";
    case ErrorCode::DegenerateBand: return "DegenerateBand";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::Validation: return "Validation";
  }
  return "Unknown";
}

inline bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams:
    case ErrorCode::OrderMissing:
    case ErrorCode::AmplitudeCap:
    case ErrorCode::InvalidN:
    case ErrorCode::Overlap:
    case ErrorCode::ScalingTooLarge:
    case ErrorCode::GridEmpty:
    case ErrorCode::PulseOverlap:
    case ErrorCode::EmptyComb:
    case ErrorCode::GridMismatch:
    case ErrorCode::Validation:
      return true;
    default:
      return false;
  }
}

}  // namespace qns
