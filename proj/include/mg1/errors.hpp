#pragma once

#include <stdexcept>
#include <string>

namespace mg1 {

enum class ErrorCode {
  DimensionMismatch,
  InvalidParameter,
  SeriesNotConvergent,
  NotConverged,
  DriftNonNegative,
  SingularMatrix,
  HorizonTooShort,
  NotIrreducible,
  Divergent,
  DegenerateLimit,
  MassMismatch,
  CannotReachDrift,
  TruncationBiasTooLarge,
  NotFiniteSupport,
  ParseError,
  InvalidDistribution,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// that the command-line front end can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mg1
