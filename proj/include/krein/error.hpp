#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace krein {

/// Failure categories raised by the library. Every thrown krein::Error
/// carries exactly one of these so callers can branch on the kind.
enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NonFinite,
  NotHermitian,
  NoConvergence,
  Singular,
  NotMetricSelfAdjoint,
  NonPositiveSpectrum,
  NotPositiveDefinite,
  EverythingIsotropic,
  NotIndefinite,
  DegenerateSpace,
  NotPositiveSubspace,
  NotNegativeSubspace,
  NotOrthogonal,
  WrongDimensions,
  SamplingExhausted,
  NotPositive,
  InconsistentOracle,
  NotDefined,
  SingularOperator,
  NonPositiveModulus,
  NegativeTime,
  NotPositiveBijection,
  ExponentialLawViolation,
  UnitarityResidual,
  NeutralEigenvector,
  NotDiagonalizable,
  LogBranchAmbiguity,
  GridMismatch,
  AsymmetricGrid,
  TimeOutOfRange,
  GridTooNarrow,
  ShiftNotZero,
  ParseError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace krein
