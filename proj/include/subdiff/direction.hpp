#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subdiff/error.hpp"
#include "subdiff/ext_real.hpp"
#include "subdiff/model.hpp"
#include "subdiff/point.hpp"
#include "subdiff/rng.hpp"

namespace subdiff {

/// Unit ball of the direction search. SimplexGauge is the gauge of
/// co({e_1, ..., e_n, -e}) with e = (1, ..., 1).
enum class NormChoice { L2, L1, LInf, SimplexGauge };

constexpr std::string_view to_string(NormChoice n) noexcept {
  switch (n) {
    case NormChoice::L2: return "l2";
    case NormChoice::L1: return "l1";
    case NormChoice::LInf: return "linf";
    case NormChoice::SimplexGauge: return "simplex";
  }
  return "?";
}

inline std::optional<NormChoice> parse_norm(std::string_view s) {
  if (s == "l2") return NormChoice::L2;
  if (s == "l1") return NormChoice::L1;
  if (s == "linf") return NormChoice::LInf;
  if (s == "simplex") return NormChoice::SimplexGauge;
  return std::nullopt;
}

inline double norm_value(const Point& w, NormChoice norm) {
  switch (norm) {
    case NormChoice::L2: return norm2(w);
    case NormChoice::L1: return norm1(w);
    case NormChoice::LInf: return norm_inf(w);
    case NormChoice::SimplexGauge: {
      if (w.size() == 0) return 0.0;
      // w = sum_i a_i e_i - a_0 e with a >= 0; the cheapest a_0 is max(0, -min w).
      const double lift = std::max(0.0, -w.vec().minCoeff());
      return w.vec().sum() + static_cast<double>(w.size() + 1) * lift;
    }
  }
  return 0.0;
}

struct DirectionResult {
  Point w;
  ExtReal value = 0.0;  // d f(x)(w)
  bool exact = false;
  std::size_t evaluations = 0;
  NormChoice norm = NormChoice::L2;
};

namespace detail {

inline DirectionResult finish(const FunctionModel& f, const Point& x, Point w, bool exact, std::size_t evals,
                              NormChoice norm) {
  ExtReal value = f.subderivative(x, w);
  return {std::move(w), value, exact, evals + 1, norm};
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Normalized steepest descent for a model with a gradient at x.
inline DirectionResult solve_l2_smooth(const FunctionModel& f, const Point& x) {
  const auto grad = f.gradient(x);
  if (!grad) throw Error(Errc::NoGradient, f.name() + " has no gradient at this point");
  const double g = norm2(*grad);
  Point w = g > 0.0 ? (-1.0 / g) * *grad : Point::zeros(x.size());
  return detail::finish(f, x, std::move(w), true, 0, NormChoice::L2);
}

// ---------------------------------------------------------------------------

namespace detail {

struct ScalarMin {
  double t;
  double value;
};

// min over t in [-1, 1] of c t + g(t), g two-sided linear. Candidates are
// visited in the order -1, +1, 0 and only a strict improvement replaces the
// incumbent.
inline ScalarMin scalar_min_linear(double c, const ScalarPart& g) {
  ScalarMin best{-1.0, -c + g(-1.0)};
  for (double t : {1.0, 0.0}) {
    const double v = c * t + g(t);
    if (v < best.value) best = {t, v};
  }
  return best;
}

inline ScalarMin scalar_min_general(double c, const ScalarPart& g) {
  const auto h = [&](double t) { return c * t + g(t); };
  constexpr int kGrid = 65;
  std::array<double, kGrid> ts{}, hs{};
  int best = 0;
  for (int j = 0; j < kGrid; ++j) {
    ts[j] = -1.0 + 2.0 * j / (kGrid - 1);
    hs[j] = h(ts[j]);
    if (hs[j] < hs[best]) best = j;
  }
  double lo = ts[std::max(best - 1, 0)], hi = ts[std::min(best + 1, kGrid - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo), b = lo + inv_phi * (hi - lo);
  double ha = h(a), hb = h(b);
  while (hi - lo > 1e-10) {
    if (ha <= hb) {
      hi = b;
      b = a;
      hb = ha;
      a = hi - inv_phi * (hi - lo);
      ha = h(a);
    } else {
      lo = a;
      a = b;
      ha = hb;
      b = lo + inv_phi * (hi - lo);
      hb = h(b);
    }
  }
  ScalarMin out{ts[best], hs[best]};
  const double mid = 0.5 * (lo + hi);
  if (const double hm = h(mid); hm < out.value) out = {mid, hm};
  return out;
}

}  // namespace detail

/// Coordinatewise solution of min_{|w_i| <= 1} sum_i c_i w_i + g_i(w_i). The value
/// is the sum of the scalar minima.
inline DirectionResult solve_linf_separable(const SeparableForm& form) {
  const std::size_t n = form.parts.size();
  require(form.gradient.size() == n, Errc::DimensionMismatch, "separable form: gradient and parts differ in size");
  Vector w(static_cast<Eigen::Index>(n));
  double total = 0.0;
  bool exact = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& g = form.parts[i];
    detail::ScalarMin m{};
    if (g.piecewise_linear()) {
      m = detail::scalar_min_linear(form.gradient[i], g);
    } else {
      m = detail::scalar_min_general(form.gradient[i], g);
      exact = false;
    }
    w[static_cast<Eigen::Index>(i)] = m.t;
    total += m.value;
  }
  return {Point(std::move(w)), total, exact, n, NormChoice::LInf};
}

inline DirectionResult solve_linf_separable(const FunctionModel& f, const Point& x) {
  const auto form = f.separable_form(x);
  if (!form) throw Error(Errc::NotSeparable, f.name() + " declares no separable subderivative");
  auto r = solve_linf_separable(*form);
  return detail::finish(f, x, std::move(r.w), r.exact, r.evaluations, NormChoice::LInf);
}

// ---------------------------------------------------------------------------

/// Vertices of the unit ball: e_1, -e_1, e_2, -e_2, ... or, reduced,
/// e_1, ..., e_n, -e.
inline std::vector<Point> l1_vertices(std::size_t n, bool reduced) {
  std::vector<Point> out;
  if (reduced) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(Point::unit(n, i));
    out.emplace_back(Vector(Vector::Constant(static_cast<Eigen::Index>(n), -1.0)));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(Point::unit(n, i, 1.0));
      out.push_back(Point::unit(n, i, -1.0));
    }
  }
  return out;
}

/// Minimizes d f(x)(.) over the vertex set; exact when the subderivative is
/// concave in w. First vertex wins ties.
inline DirectionResult solve_l1_extreme(const FunctionModel& f, const Point& x, bool reduced = false) {
  require_dim(x, f.dimension(), "l1 direction search");
  const auto vertices = l1_vertices(x.size(), reduced);
  require(!vertices.empty(), Errc::InvalidArgument, "empty vertex set");
  std::size_t best = 0;
  ExtReal best_value = f.subderivative(x, vertices[0]);
  for (std::size_t k = 1; k < vertices.size(); ++k) {
    const ExtReal v = f.subderivative(x, vertices[k]);
    if (v < best_value) {
      best = k;
      best_value = v;
    }
  }
  return {vertices[best], best_value, f.concave_subderivative(), vertices.size(),
          reduced ? NormChoice::SimplexGauge : NormChoice::L1};
}

// ---------------------------------------------------------------------------

/// Point on the unit sphere of `norm`, from `rng`.
inline Point sample_unit_sphere(Rng& rng, std::size_t n, NormChoice norm) {
  for (;;) {
    Vector v(static_cast<Eigen::Index>(n));
    switch (norm) {
      case NormChoice::L2:
      case NormChoice::SimplexGauge:
        v = rng.normal_vector(n).vec();
        break;
      case NormChoice::L1:
        // Normalized i.i.d. exponentials are uniform on the simplex.
        for (auto& c : v) {
          double u = rng.uniform();
          while (u <= 0.0) u = rng.uniform();
          c = -std::log(u) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        }
        break;
      case NormChoice::LInf:
        for (auto& c : v) c = rng.uniform(-1.0, 1.0);
        break;
    }
    const Point p(std::move(v));
    const double r = norm_value(p, norm);
    if (r > 1e-300) return (1.0 / r) * p;
  }
}

/// Best of the signed coordinate directions, the normalized negative gradient and
/// `budget` seeded samples on the unit sphere. Directions with value +inf are
/// discarded; if nothing finite remains the result is w = 0.
inline DirectionResult solve_sampling_fallback(const FunctionModel& f, const Point& x, NormChoice norm,
                                               std::size_t budget, std::uint64_t seed) {
  const std::size_t n = x.size();
  require_dim(x, f.dimension(), "fallback direction search");
  std::optional<Point> best;
  ExtReal best_value = ExtReal::pos_inf();
  std::size_t evals = 0;
  const auto consider = [&](const Point& w) {
    const ExtReal v = f.subderivative(x, w);
    ++evals;
    if (v.is_pos_inf()) return;
    if (!best || v < best_value) {
      best = w;
      best_value = v;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (double s : {1.0, -1.0}) {
      const Point e = Point::unit(n, i, s);
      consider((1.0 / norm_value(e, norm)) * e);
    }
  }
  if (const auto grad = f.gradient(x)) {
    const double g = norm_value(*grad, norm);
    if (g > 0.0) consider((-1.0 / g) * *grad);
  }
  Rng rng(seed);
  for (std::size_t k = 0; k < budget; ++k) consider(sample_unit_sphere(rng, n, norm));
  if (!best) return detail::finish(f, x, Point::zeros(n), false, evals, norm);
  return {*best, best_value, false, evals, norm};
}

// ---------------------------------------------------------------------------

struct DirectionStrategy {
  enum class Kind { Auto, L2Smooth, LInfSeparable, L1Extreme, Fallback };
  Kind kind = Kind::Auto;
  bool reduced = false;     // L1Extreme over e_1..e_n, -e
  std::size_t budget = 64;  // Fallback samples
  std::uint64_t seed = 0;
};

constexpr std::string_view to_string(DirectionStrategy::Kind k) noexcept {
  using K = DirectionStrategy::Kind;
  switch (k) {
    case K::Auto: return "auto";
    case K::L2Smooth: return "l2";
    case K::LInfSeparable: return "linf-sep";
    case K::L1Extreme: return "l1-ext";
    case K::Fallback: return "fallback";
  }
  return "?";
}

inline std::optional<DirectionStrategy::Kind> parse_strategy(std::string_view s) {
  using K = DirectionStrategy::Kind;
  for (K k : {K::Auto, K::L2Smooth, K::LInfSeparable, K::L1Extreme, K::Fallback}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

/// Concrete solver Auto resolves to for this (f, x, norm). The norm decides
/// which structure is looked for, so the chosen unit ball is always honored.
inline DirectionStrategy::Kind resolve_strategy(const FunctionModel& f, const Point& x, NormChoice norm) {
  using K = DirectionStrategy::Kind;
  switch (norm) {
    case NormChoice::L2:
      if (f.gradient(x)) return K::L2Smooth;
      break;
    case NormChoice::LInf:
      if (f.separable_form(x)) return K::LInfSeparable;
      break;
    case NormChoice::L1:
    case NormChoice::SimplexGauge:
      if (f.concave_subderivative()) return K::L1Extreme;
      break;
  }
  return K::Fallback;
}

/// One direction search. `stream` perturbs the fallback seed so successive
/// iterations draw fresh samples.
inline DirectionResult search_direction(const FunctionModel& f, const Point& x, NormChoice norm,
                                        const DirectionStrategy& strategy, std::uint64_t stream = 0) {
  using K = DirectionStrategy::Kind;
  const K kind = strategy.kind == K::Auto ? resolve_strategy(f, x, norm) : strategy.kind;
  switch (kind) {
    case K::L2Smooth: return solve_l2_smooth(f, x);
    case K::LInfSeparable: return solve_linf_separable(f, x);
    case K::L1Extreme: return solve_l1_extreme(f, x, strategy.reduced || norm == NormChoice::SimplexGauge);
    case K::Fallback:
    case K::Auto: break;
  }
  return solve_sampling_fallback(f, x, norm, strategy.budget, Rng::splitmix64(strategy.seed) ^ stream);
}

}  // namespace subdiff
