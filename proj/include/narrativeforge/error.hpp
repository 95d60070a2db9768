#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace narrativeforge {

enum class ErrorCode {
  parse,
  validation,
  not_found,
  lock_violation,
  transport,
  extraction,
  empty_profile,
  categorization,
  generation,
  update,
  embedding,
  storage,
  conflict,
  unsupported,
  usage,
};

std::string_view to_string(ErrorCode code);

// HTTP status used when an error surfaces through the service.
int http_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, bool retryable = false)
      : std::runtime_error(message), code_(code), retryable_(retryable) {}

  ErrorCode code() const noexcept { return code_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  ErrorCode code_;
  bool retryable_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace narrativeforge
