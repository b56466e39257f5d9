#pragma once

#include <doctest.h>

#include <functional>

#include "causalcal/error.hpp"

namespace testing {

/// Runs fn and returns the category of the causalcal::Error it throws.
inline causalcal::ErrorCategory category_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const causalcal::Error& e) {
    return e.category();
  }
  FAIL("expected a causalcal::Error");
  return causalcal::ErrorCategory::invalid_state;
}

}  // namespace testing

#define CHECK_CATEGORY(expr, cat) CHECK(testing::category_of([&] { (void)(expr); }) == causalcal::ErrorCategory::cat)
