#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace unifilar {

// Machine-readable failure classes. The CLI maps each one to its own exit
// status, so the numeric values are part of the command-line contract.
enum class ErrorCategory {
  invalid_input = 3,   // malformed values, out-of-range symbols or states
  malformed_file = 4,  // unparsable or version-mismatched files
  envelope = 5,        // exact computation refused (too large)
  indeterminate = 6,   // bracketed values make a point answer impossible
  non_stationary = 7,  // stationary distribution missing or not unique
  invariant = 8,       // an internal consistency check failed
  usage = 2,           // unknown flags or missing arguments
};

std::string_view category_name(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& message) {
  throw Error(c, message);
}

inline void require(bool ok, ErrorCategory c, const std::string& message) {
  if (!ok) throw Error(c, message);
}

}  // namespace unifilar
