#include "unifilar/error.hpp"

namespace unifilar {

std::string_view category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::invalid_input: return "invalid_input";
    case ErrorCategory::malformed_file: return "malformed_file";
    case ErrorCategory::envelope: return "envelope";
    case ErrorCategory::indeterminate: return "indeterminate";
    case ErrorCategory::non_stationary: return "non_stationary";
    case ErrorCategory::invariant: return "invariant";
    case ErrorCategory::usage: return "usage";
  }
  return "unknown";
}

}  // namespace unifilar
