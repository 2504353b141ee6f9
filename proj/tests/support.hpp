#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include <gtest/gtest.h>

#include "subdiff/subdiff.hpp"

namespace subdiff::testing {

inline ::testing::AssertionResult ext_near(const ExtReal& got, double want, double tol) {
  if (std::isinf(want)) {
    if (got.to_double() == want) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "got " << got << ", want " << want;
  }
  if (got.is_finite() && std::abs(got.value() - want) <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "got " << got << ", want " << want << " (tol " << tol << ")";
}

/// Dense grid minimum of h over [lo, hi]; returns {argmin, min}.
inline std::pair<double, double> grid_min(const std::function<double(double)>& h, double lo, double hi,
                                          int points = 200001) {
  double best_t = lo, best = h(lo);
  for (int j = 1; j < points; ++j) {
    const double t = lo + (hi - lo) * j / (points - 1);
    const double v = h(t);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  return {best_t, best};
}

/// One-sided difference quotient (f(x + t w) - f(x)) / t.
inline double quotient(const FunctionModel& f, const Point& x, const Point& w, double t) {
  return (f.value(x + t * w).value() - f.value(x).value()) / t;
}

inline FDConfig full_limit() { return FDConfig{}; }

}  // namespace subdiff::testing
