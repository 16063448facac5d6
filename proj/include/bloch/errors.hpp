#pragma once

#include <stdexcept>
#include <string>

namespace bloch {

enum class ErrorCode {
  NonFiniteInput,
  NegativeRate,
  NegativeTime,
  BranchMismatch,
  ZeroRootInDoubleBranch,
  SingularGamma,
  DegenerateEigenvalue,
  ZeroColumn,
  NearSingularFrame,
  NoFrame,
  OutOfRange,
  NegativeInput,
  ResolutionTooLarge,
  StepTooLarge,
  NonFinite,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::BranchMismatch: return "BranchMismatch";
    case ErrorCode::ZeroRootInDoubleBranch: return "ZeroRootInDoubleBranch";
    case ErrorCode::SingularGamma: return "SingularGamma";
    case ErrorCode::DegenerateEigenvalue: return "DegenerateEigenvalue";
    case ErrorCode::ZeroColumn: return "ZeroColumn";
    case ErrorCode::NearSingularFrame: return "NearSingularFrame";
    case ErrorCode::NoFrame: return "NoFrame";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::ResolutionTooLarge: return "ResolutionTooLarge";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

class BlochError : public std::runtime_error {
 public:
  BlochError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  const char* code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
  throw BlochError(code, message);
}

}  // namespace bloch
