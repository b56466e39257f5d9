#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace causalcal {

/// Stable error categories. The string forms are part of the CLI error payload.
enum class ErrorCategory {
  invalid_argument,
  data_error,
  degenerate_data,
  invalid_nuisance,
  division_by_zero,
  invalid_state,
  degenerate_fit,
  unbounded_objective,
  config_error,
  evaluation_error,
  usage_error,
  io_error,
};

std::string_view category_name(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

  /// Same category, message prefixed with `context: `.
  Error with_context(const std::string& context) const {
    return Error(category_, context + ": " + what());
  }

 private:
  ErrorCategory category_;
};

inline std::string_view category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::invalid_argument: return "invalid-argument";
    case ErrorCategory::data_error: return "data-error";
    case ErrorCategory::degenerate_data: return "degenerate-data";
    case ErrorCategory::invalid_nuisance: return "invalid-nuisance";
    case ErrorCategory::division_by_zero: return "division-by-zero";
    case ErrorCategory::invalid_state: return "invalid-state";
    case ErrorCategory::degenerate_fit: return "degenerate-fit";
    case ErrorCategory::unbounded_objective: return "unbounded-objective";
    case ErrorCategory::config_error: return "config-error";
    case ErrorCategory::evaluation_error: return "evaluation-error";
    case ErrorCategory::usage_error: return "usage-error";
    case ErrorCategory::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace causalcal
