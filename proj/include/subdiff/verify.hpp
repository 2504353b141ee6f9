#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "subdiff/direction.hpp"
#include "subdiff/error.hpp"
#include "subdiff/ext_real.hpp"
#include "subdiff/maps.hpp"
#include "subdiff/model.hpp"
#include "subdiff/point.hpp"
#include "subdiff/rng.hpp"
#include "subdiff/sets.hpp"
#include "subdiff/solver.hpp"

// Independent oracles. Nothing here calls into the closed-form subderivative
// of the model under test except where the checked inequality itself needs it.

namespace subdiff {

// ---------------------------------------------------------------------------
// Finite differences on the grid t_j = t0 * rho^j, w' on spheres of radius
// min(t, 0.1 ||w||) around w.

enum class FDMode { LiminfApprox, FullLimit };

struct FDConfig {
  double t0 = 1e-2;
  double rho = 0.5;
  std::size_t levels = 20;
  std::size_t perturbations = 8;
  std::size_t tail = 3;
  FDMode mode = FDMode::FullLimit;
  double divergence = 1e8;
  double agreement_tol = 1e-5;
  std::uint64_t seed = 0;

  void validate() const {
    require(t0 > 0.0 && rho > 0.0 && rho < 1.0, Errc::InvalidArgument, "fd grid needs t0 > 0 and 0 < rho < 1");
    require(levels >= 1 && tail >= 1 && tail <= levels, Errc::InvalidArgument, "fd grid needs 1 <= tail <= levels");
  }
};

struct FDResult {
  ExtReal estimate = 0.0;
  bool converged = false;  // tail quotients agree within agreement_tol
  bool diverged = false;
  double spread = 0.0;             // max - min over the finite tail quotients
  std::vector<double> t;           // grid
  std::vector<double> center;      // quotient at w per level
  std::vector<double> level_min;   // min over w' per level
};

namespace detail {

inline double quotient(const FunctionModel& f, double fx, const Point& x, double t, const Point& w) {
  const ExtReal v = f.value(x + t * w);
  if (!v.is_finite()) return v.to_double();
  return (v.value() - fx) / t;
}

}  // namespace detail

inline FDResult fd_subderivative(const FunctionModel& f, const Point& x, const Point& w, const FDConfig& cfg = {}) {
  cfg.validate();
  require_dim(x, f.dimension(), "fd point");
  require_dim(w, f.dimension(), "fd direction");
  const ExtReal fx_ext = f.value(x);
  if (!fx_ext.is_finite()) throw Error(Errc::DomainViolation, "fd: f(x) is not finite");
  const double fx = fx_ext.value();
  const std::size_t n = x.size();

  Rng rng(cfg.seed);
  std::vector<Point> dirs;
  for (std::size_t k = 0; k < cfg.perturbations; ++k) dirs.push_back(rng.unit_sphere(n));

  FDResult out;
  const double wn = norm2(w);
  double t = cfg.t0;
  for (std::size_t j = 0; j < cfg.levels; ++j, t *= cfg.rho) {
    out.t.push_back(t);
    const double c = detail::quotient(f, fx, x, t, w);
    double lo = c;
    const double radius = std::min(t, 0.1 * wn);
    if (radius > 0.0) {
      for (const auto& u : dirs) lo = std::min(lo, detail::quotient(f, fx, x, t, w + radius * u));
    }
    out.center.push_back(c);
    out.level_min.push_back(lo);
  }

  const std::size_t first = cfg.levels - cfg.tail;
  double tail_min = std::numeric_limits<double>::infinity();
  double tail_max = -std::numeric_limits<double>::infinity();
  for (std::size_t j = first; j < cfg.levels; ++j) {
    tail_min = std::min({tail_min, out.level_min[j], out.center[j]});
    tail_max = std::max(tail_max, out.center[j]);
  }

  // Divergence: a quotient past the threshold, or the center quotient growing
  // like 1/t across the whole tail and already large.
  const auto growing = [&](double sign) {
    if (cfg.tail < 2) return false;
    for (std::size_t j = first + 1; j < cfg.levels; ++j) {
      const double prev = sign * out.center[j - 1], cur = sign * out.center[j];
      if (!(prev > 0.0) || cur < prev * 0.9 / cfg.rho) return false;
    }
    return sign * out.center.back() >= std::sqrt(cfg.divergence);
  };
  if (tail_min <= -cfg.divergence || growing(-1.0)) {
    out.diverged = true;
    out.estimate = ExtReal::neg_inf();
    return out;
  }
  if (tail_min >= cfg.divergence || growing(1.0)) {
    out.diverged = true;
    out.estimate = ExtReal::pos_inf();
    return out;
  }

  double tail_hi = tail_max;
  for (std::size_t j = first; j < cfg.levels; ++j) tail_hi = std::max(tail_hi, out.level_min[j]);
  out.spread = tail_hi - tail_min;
  out.converged = std::isfinite(out.spread) && out.spread <= cfg.agreement_tol * (1.0 + std::abs(out.center.back()));
  out.estimate = cfg.mode == FDMode::LiminfApprox ? ExtReal(tail_min) : ExtReal(out.center.back());
  return out;
}

struct FDMapResult {
  Point estimate;
  bool converged = false;
  double spread = 0.0;
};

/// Forward-difference semi-derivative of a map at the finest grid level.
inline FDMapResult fd_semiderivative(const SemiDiffMap& map, const Point& x, const Point& w, const FDConfig& cfg = {}) {
  cfg.validate();
  require_dim(x, map.dimension_in(), "fd map point");
  require_dim(w, map.dimension_in(), "fd map direction");
  const Point fx = map.eval(x);
  std::vector<Vector> tail;
  double t = cfg.t0;
  for (std::size_t j = 0; j < cfg.levels; ++j, t *= cfg.rho) {
    if (j + cfg.tail < cfg.levels) continue;
    tail.push_back((map.eval(x + t * w).vec() - fx.vec()) / t);
  }
  FDMapResult out;
  out.estimate = Point(tail.back());
  for (const auto& q : tail) out.spread = std::max(out.spread, (q - tail.back()).lpNorm<Eigen::Infinity>());
  out.converged = out.spread <= cfg.agreement_tol * (1.0 + tail.back().lpNorm<Eigen::Infinity>());
  return out;
}

// ---------------------------------------------------------------------------

/// Dense enumeration of the unit sphere of `norm`. For n = 2 under the
/// Euclidean norm the grid is angular with step `resolution`; otherwise it is a
/// grid of spacing `resolution` on the cube surface, rescaled onto the sphere,
/// plus the signed unit vectors and the cube vertices.
inline DirectionResult brute_force_direction(const FunctionModel& f, const Point& x, NormChoice norm,
                                             double resolution) {
  const std::size_t n = x.size();
  require_dim(x, f.dimension(), "brute force point");
  if (n > 4) throw Error(Errc::DimensionTooLarge, "brute force search is limited to n <= 4");
  require(resolution > 0.0 && resolution <= 1.0, Errc::InvalidArgument, "resolution must lie in (0, 1]");

  std::optional<Point> best;
  ExtReal best_value = ExtReal::pos_inf();
  std::size_t evals = 0;
  const auto consider = [&](const Point& v) {
    const double r = norm_value(v, norm);
    if (!(r > 0.0)) return;
    const Point w = (1.0 / r) * v;
    const ExtReal val = f.subderivative(x, w);
    ++evals;
    if (!best || val < best_value) {
      best = w;
      best_value = val;
    }
  };

  if (n == 0) return {Point::zeros(0), 0.0, false, 0, norm};
  if (n == 1) {
    consider(Point{-1.0});
    consider(Point{1.0});
  } else if (n == 2 && norm == NormChoice::L2) {
    const auto steps = static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / resolution));
    for (std::size_t k = 0; k < steps; ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(steps);
      consider(Point{std::cos(a), std::sin(a)});
    }
  } else {
    const auto m = static_cast<std::size_t>(std::ceil(2.0 / resolution)) + 1;
    double total = 2.0 * static_cast<double>(n);
    for (std::size_t i = 1; i < n; ++i) total *= static_cast<double>(m);
    require(total <= 5e6, Errc::InvalidArgument, "brute force grid too fine for this dimension");
    for (std::size_t i = 0; i < n; ++i) {
      consider(Point::unit(n, i, 1.0));
      consider(Point::unit(n, i, -1.0));
    }
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      Vector v(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = (mask >> i) & 1u ? 1.0 : -1.0;
      consider(Point(std::move(v)));
    }
    if (norm == NormChoice::SimplexGauge) consider(Point(Vector(Vector::Constant(static_cast<Eigen::Index>(n), -1.0))));
    std::vector<std::size_t> idx(n - 1, 0);
    for (std::size_t face = 0; face < 2 * n; ++face) {
      const std::size_t fixed = face / 2;
      const double side = face % 2 ? -1.0 : 1.0;
      std::fill(idx.begin(), idx.end(), 0);
      for (;;) {
        Vector v(static_cast<Eigen::Index>(n));
        std::size_t slot = 0;
        for (std::size_t i = 0; i < n; ++i) {
          v[static_cast<Eigen::Index>(i)] =
              i == fixed ? side : -1.0 + 2.0 * static_cast<double>(idx[slot++]) / static_cast<double>(m - 1);
        }
        consider(Point(std::move(v)));
        std::size_t d = 0;
        while (d < idx.size() && ++idx[d] == m) idx[d++] = 0;
        if (d == idx.size()) break;
      }
    }
  }
  return {*best, best_value, false, evals, norm};
}

// ---------------------------------------------------------------------------

struct DescentViolation {
  Point x, y;
  double gap = 0.0;
};

struct DescentSample {
  std::vector<DescentViolation> violations;
  double max_gap = -std::numeric_limits<double>::infinity();
  std::size_t pairs = 0;
  std::size_t skipped = 0;  // pairs with f(x) outside the domain
};

/// Samples f(y) <= f(x) + d f(x)(y - x) + L/2 ||y - x||^2 over uniform pairs in
/// the box [lower, upper].
inline DescentSample descent_property_sample(const FunctionModel& f, double lipschitz, const Vector& lower,
                                             const Vector& upper, std::size_t pairs, std::uint64_t seed,
                                             double tol = 1e-9) {
  require(lipschitz >= 0.0, Errc::InvalidArgument, "L must be >= 0");
  require(lower.size() == upper.size() && static_cast<std::size_t>(lower.size()) == f.dimension(),
          Errc::DimensionMismatch, "descent sample: box does not match f");
  Rng rng(seed);
  const auto draw = [&] {
    Vector v(lower.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(lower[i], upper[i]);
    return Point(std::move(v));
  };
  DescentSample out;
  for (std::size_t k = 0; k < pairs; ++k) {
    const Point x = draw(), y = draw();
    ++out.pairs;
    const ExtReal fx = f.value(x);
    if (!fx.is_finite()) {
      ++out.skipped;
      continue;
    }
    const Point h = y - x;
    const ExtReal rhs = fx + f.subderivative(x, h) + ExtReal(0.5 * lipschitz * h.vec().squaredNorm());
    const ExtReal fy = f.value(y);
    double gap = 0.0;
    if (rhs.is_pos_inf() || fy.is_neg_inf()) gap = -std::numeric_limits<double>::infinity();
    else if (fy.is_pos_inf() || rhs.is_neg_inf()) gap = std::numeric_limits<double>::infinity();
    else gap = fy.value() - rhs.value();
    out.max_gap = std::max(out.max_gap, gap);
    if (gap > tol) out.violations.push_back({x, y, gap});
  }
  return out;
}

/// f(x_{k+1}) - f(x_k) <= -M min{|d_k|, d_k^2} per recorded step.
inline std::vector<bool> sufficient_decrease_audit(const Trace& trace, double m) {
  std::vector<bool> out;
  out.reserve(trace.records.size());
  for (const auto& r : trace.records) out.push_back(sufficient_decrease(r, m, rounding_slack(r.f)));
  return out;
}

/// w is tangent to {x : G(x) in X} at x iff dG(x)(w) is tangent to X at G(x).
inline bool tangent_membership(const SemiDiffMap& g, const SetModel& set, const Point& x, const Point& w,
                               double tol = 1e-9) {
  const Point gx = g.eval(x);
  if (!set.contains(gx)) throw Error(Errc::NotFeasible, "G(x) is not in " + set.name());
  return set.tangent_distance(gx, g.semiderivative(x, w)) <= tol;
}

// ---------------------------------------------------------------------------
// Closed-form steepest direction for phi + lambda ||.||_1 under the max-norm,
// classified by sign of x_i and of dphi_i +- lambda.

/// Index set 1..7 of coordinate i.
inline int index_set_of(double xi, double gi, double lambda) {
  if (xi > 0.0) return gi + lambda >= 0.0 ? 1 : 2;
  if (xi < 0.0) return gi - lambda >= 0.0 ? 3 : 4;
  if (gi - lambda >= 0.0) return 5;
  if (gi + lambda <= 0.0) return 6;
  return 7;
}

inline Point index_set_direction(const Point& grad, const Point& x, double lambda) {
  require(lambda > 0.0, Errc::InvalidArgument, "lambda must be positive");
  require_dim(grad, x.size(), "index set gradient");
  Vector w(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    switch (index_set_of(x[i], grad[i], lambda)) {
      case 1: case 3: case 5: w[static_cast<Eigen::Index>(i)] = -1.0; break;
      case 2: case 4: case 6: w[static_cast<Eigen::Index>(i)] = 1.0; break;
      default: w[static_cast<Eigen::Index>(i)] = 0.0; break;
    }
  }
  return Point(std::move(w));
}

}  // namespace subdiff
