#pragma once

#include <stdexcept>
#include <string>

namespace winsel {

/// Error categories surfaced through the CLI as machine-readable codes.
enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  degenerate_design,
  degenerate_pair,
  numerical_failure,
  insufficient_trials,
  uncalibrated,
  invalid_config,
  io_failure,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::degenerate_design: return "degenerate_design";
    case ErrorCode::degenerate_pair: return "degenerate_pair";
    case ErrorCode::numerical_failure: return "numerical_failure";
    case ErrorCode::insufficient_trials: return "insufficient_trials";
    case ErrorCode::uncalibrated: return "uncalibrated";
    case ErrorCode::invalid_config: return "invalid_config";
    case ErrorCode::io_failure: return "io_failure";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace detail
}  // namespace winsel
