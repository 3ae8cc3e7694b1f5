#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace comte {

enum class ErrorCode {
  invalid_argument,
  schema_mismatch,
  no_distractor,
  distractor_below_target,
  classifier_failure,
  degenerate_input,
  parse_error,
  io_error,
};

/// Stable machine-readable name, e.g. "no-distractor".
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string payload = {})
      : std::runtime_error(message), code_(code), payload_(std::move(payload)) {}

  ErrorCode code() const noexcept { return code_; }

  /// Raw data attached to the failure (e.g. the offending wire line).
  const std::string& payload() const noexcept { return payload_; }

 private:
  ErrorCode code_;
  std::string payload_;
};

}  // namespace comte
