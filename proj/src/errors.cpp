#include "mg1/errors.hpp"

namespace mg1 {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::SeriesNotConvergent: return "SeriesNotConvergent";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::DriftNonNegative: return "DriftNonNegative";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::HorizonTooShort: return "HorizonTooShort";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::Divergent: return "Divergent";
    case ErrorCode::DegenerateLimit: return "DegenerateLimit";
    case ErrorCode::MassMismatch: return "MassMismatch";
    case ErrorCode::CannotReachDrift: return "CannotReachDrift";
    case ErrorCode::TruncationBiasTooLarge: return "TruncationBiasTooLarge";
    case ErrorCode::NotFiniteSupport: return "NotFiniteSupport";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
  }
  return "Unknown";
}

}  // namespace mg1
