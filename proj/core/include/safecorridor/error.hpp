#pragma once

#include <stdexcept>
#include <string>

namespace safecorridor {

enum class ErrorCode {
  kNoSamples,
  kInvalidSample,
  kSingularCovariance,
  kNegativeStatistic,
  kDegenerateConfidenceLevel,
  kInvalidArgument,
  kProjectionNonconvergent,
  kEmptyCorridor,
  kInvalidEndpoints,
  kSingularJacobian,
  kDimensionMismatch,
  kParse,
};

/// Library-wide exception. what() carries the short message callers match on
/// (e.g. "no samples", "empty corridor").
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* to_string(ErrorCode code);

}  // namespace safecorridor
