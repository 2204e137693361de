#pragma once

#include <stdexcept>
#include <string>

namespace zeroday {

enum class ErrorCode {
  argument,  // bad call arguments / precondition violation
  config,    // invalid run configuration
  data,      // malformed or unusable input data
  io,        // filesystem failure
  numeric,   // numeric failure (non-convergence, non-finite values)
  state,     // artifact mismatch (model paired with the wrong pipeline)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace zeroday
