#pragma once

#include <stdexcept>
#include <string>

namespace weylscale {

enum class ErrorCode {
  NonMonotone,
  MissingPrepoint,
  EmptyInterval,
  IndexOutOfRange,
  NonSquare,
  NotHermitian,
  IndefiniteInput,
  DimensionMismatch,
  SingularAt,
  SingularE2,
  SingularU,
  IntegratorFailure,
  AdjointMismatch,
  MissingSigmaSample,
  NegativeRadius,
  DiskUndefined,
  NotContraction,
  ConeViolation,
  EpsilonOutOfRange,
  ZeroP,
  NonPositiveW,
  ZeroP2,
  ZeroPn,
  LengthMismatch,
  NonPositiveParams,
  VariantMismatch,
  RangeMismatch,
  ConfigError,
  NumericFailure,
};

const char* error_code_name(ErrorCode code);

class WeylError : public std::runtime_error {
 public:
  WeylError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace weylscale
