#include "safecorridor/error.hpp"

namespace safecorridor {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoSamples: return "no samples";
    case ErrorCode::kInvalidSample: return "invalid sample";
    case ErrorCode::kSingularCovariance: return "singular covariance";
    case ErrorCode::kNegativeStatistic: return "negative statistic";
    case ErrorCode::kDegenerateConfidenceLevel: return "degenerate confidence level";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kProjectionNonconvergent: return "projection nonconvergent";
    case ErrorCode::kEmptyCorridor: return "empty corridor";
    case ErrorCode::kInvalidEndpoints: return "invalid endpoints";
    case ErrorCode::kSingularJacobian: return "singular Jacobian";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kParse: return "parse error";
  }
  return "unknown";
}

}  // namespace safecorridor
