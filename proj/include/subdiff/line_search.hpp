#pragma once

#include <cmath>
#include <cstddef>
#include <variant>

#include "subdiff/error.hpp"
#include "subdiff/ext_real.hpp"
#include "subdiff/model.hpp"
#include "subdiff/point.hpp"

namespace subdiff {

struct ArmijoParams {
  double mu = 0.5;  // reduction multiple
  double alpha_init = 1.0;
  std::size_t max_backtracks = 60;

  void validate() const {
    require(mu > 0.0 && mu < 1.0, Errc::InvalidArgument, "armijo: mu must lie in (0, 1)");
    require(alpha_init > 0.0 && std::isfinite(alpha_init), Errc::InvalidArgument, "armijo: alpha_init must be > 0");
    require(max_backtracks >= 1, Errc::InvalidArgument, "armijo: max_backtracks must be >= 1");
  }
};

/// alpha_k = alpha0 / (k + 1).
struct Diminishing {
  double alpha0 = 1.0;
};

using Schedule = std::variant<ArmijoParams, Diminishing>;

struct StepResult {
  double alpha = 0.0;
  std::size_t backtracks = 0;
};

/// Largest alpha_init * mu^m with f(x + alpha w) - f(x) < (alpha / 2) d.
/// `d` is the direction-search value, passed in rather than recomputed.
inline StepResult armijo(const FunctionModel& f, const Point& x, const Point& w, double d, const ArmijoParams& p) {
  p.validate();
  require(d < 0.0, Errc::InvalidArgument, "armijo needs a descent value d < 0");
  const ExtReal fx = f.value(x);
  require(fx.is_finite(), Errc::DomainViolation, "armijo: f(x) is not finite");
  double alpha = p.alpha_init;
  for (std::size_t m = 0; m <= p.max_backtracks; ++m) {
    const ExtReal trial = f.value(x + alpha * w);
    // +inf trials (leaving dom f) are rejected like any other failure.
    if (trial.is_neg_inf() || (trial.is_finite() && trial.value() - fx.value() < 0.5 * alpha * d)) {
      return {alpha, m};
    }
    alpha *= p.mu;
  }
  throw Error(Errc::BacktrackExhausted, "no step accepted after " + std::to_string(p.max_backtracks) + " backtracks");
}

/// Step k of `s`; Armijo delegates to armijo().
inline StepResult schedule_step(const Schedule& s, std::size_t k, const FunctionModel& f, const Point& x,
                                const Point& w, double d) {
  if (const auto* dim = std::get_if<Diminishing>(&s)) {
    require(dim->alpha0 > 0.0 && std::isfinite(dim->alpha0), Errc::InvalidArgument, "alpha0 must be > 0");
    return {dim->alpha0 / static_cast<double>(k + 1), 0};
  }
  return armijo(f, x, w, d, std::get<ArmijoParams>(s));
}

}  // namespace subdiff
