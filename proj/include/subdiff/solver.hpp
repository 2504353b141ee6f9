#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subdiff/direction.hpp"
#include "subdiff/error.hpp"
#include "subdiff/line_search.hpp"
#include "subdiff/model.hpp"
#include "subdiff/point.hpp"

namespace subdiff {

struct SolverConfig {
  double epsilon = 1e-3;
  NormChoice norm = NormChoice::L2;
  Schedule schedule = ArmijoParams{};
  std::size_t max_iter = 1000;
  DirectionStrategy strategy;
  double floor = -1e12;  // f below this ends the run as Unbounded
  bool keep_iterates = false;
  bool record_timing = true;

  void validate() const {
    require(epsilon >= 0.0 && !std::isnan(epsilon), Errc::InvalidArgument, "epsilon must be >= 0");
    require(max_iter >= 1, Errc::InvalidArgument, "max_iter must be >= 1");
    if (const auto* a = std::get_if<ArmijoParams>(&schedule)) a->validate();
  }
};

enum class Status { EpsStationary, NoDescentFound, MaxIter, Unbounded, BacktrackExhausted };

constexpr std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::EpsStationary: return "EpsStationary";
    case Status::NoDescentFound: return "NoDescentFound";
    case Status::MaxIter: return "MaxIter";
    case Status::Unbounded: return "Unbounded";
    case Status::BacktrackExhausted: return "BacktrackExhausted";
  }
  return "?";
}

inline std::optional<Status> parse_status(std::string_view s) {
  for (Status st : {Status::EpsStationary, Status::NoDescentFound, Status::MaxIter, Status::Unbounded,
                    Status::BacktrackExhausted}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

/// One accepted step x_{k+1} = x_k + alpha w_k.
struct IterationRecord {
  std::size_t k = 0;
  double f = 0.0;          // f(x_k)
  double dir_value = 0.0;  // d f(x_k)(w_k)
  double alpha = 0.0;
  std::size_t backtracks = 0;
  double step_norm = 0.0;  // ||x_{k+1} - x_k||_2
  std::int64_t wall_ns = 0;
  double f_next = 0.0;  // f(x_{k+1})
};

struct Trace {
  std::vector<IterationRecord> records;
  std::vector<Point> iterates;  // x_0, x_1, ... when keep_iterates is set
  Point final_x;
  double final_f = 0.0;
  double final_dir_value = 0.0;  // value of the search at final_x, if one ran
  bool final_search_ran = false;
  bool certified = false;  // last direction search was exact
  Status status = Status::MaxIter;
  std::string message;

  std::size_t steps() const noexcept { return records.size(); }

  /// d_0, ..., d_K: one entry per direction search, the terminal one included.
  std::vector<double> direction_values() const {
    std::vector<double> d;
    d.reserve(records.size() + 1);
    for (const auto& r : records) d.push_back(r.dir_value);
    if (final_search_ran) d.push_back(final_dir_value);
    return d;
  }
};

/// Subderivative method: search, test d_k >= -eps, step, repeat.
inline Trace run(const FunctionModel& f, const Point& x0, const SolverConfig& cfg) {
  cfg.validate();
  require_dim(x0, f.dimension(), "initial point");
  const ExtReal f0 = f.value(x0);
  if (!f0.is_finite()) throw Error(Errc::DomainViolation, "f(x0) is not finite");

  using Clock = std::chrono::steady_clock;
  Trace trace;
  Point x = x0;
  double fx = f0.value();
  if (cfg.keep_iterates) trace.iterates.push_back(x);

  const auto finish = [&](Status s) {
    trace.status = s;
    trace.final_x = x;
    trace.final_f = fx;
    return trace;
  };

  for (std::size_t k = 0;; ++k) {
    const auto start = Clock::now();
    const DirectionResult dir = search_direction(f, x, cfg.norm, cfg.strategy, k);
    if (dir.value.is_neg_inf()) {
      throw Error(Errc::UnboundedDirection, "direction search returned -inf at iteration " + std::to_string(k));
    }
    const double d = dir.value.to_double();
    trace.final_search_ran = true;
    trace.final_dir_value = d;
    trace.certified = dir.exact;
    if (d >= -cfg.epsilon) return finish(dir.exact ? Status::EpsStationary : Status::NoDescentFound);
    if (k >= cfg.max_iter) return finish(Status::MaxIter);

    StepResult step;
    try {
      step = schedule_step(cfg.schedule, k, f, x, dir.w, d);
    } catch (const Error& e) {
      if (e.code() != Errc::BacktrackExhausted) throw;
      trace.message = e.what();
      return finish(Status::BacktrackExhausted);
    }
    const Point next = x + step.alpha * dir.w;
    const ExtReal f_next = f.value(next);
    if (f_next.is_pos_inf()) {
      throw Error(Errc::DomainViolation, "step left dom f at iteration " + std::to_string(k));
    }

    IterationRecord rec;
    rec.k = k;
    rec.f = fx;
    rec.dir_value = d;
    rec.alpha = step.alpha;
    rec.backtracks = step.backtracks;
    rec.step_norm = norm2(next - x);
    rec.f_next = f_next.to_double();
    if (cfg.record_timing) {
      rec.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
    }
    trace.records.push_back(rec);

    x = next;
    fx = f_next.to_double();
    trace.final_search_ran = false;
    if (cfg.keep_iterates) trace.iterates.push_back(x);
    if (fx < cfg.floor) return finish(Status::Unbounded);
  }
}

struct StationarityCheck {
  bool is_stationary = false;
  DirectionResult witness;
};

/// eps-d-stationarity test at x: the direction-search minimum is >= -eps. The
/// answer is a certificate only when witness.exact is set.
inline StationarityCheck check_d_stationary(const FunctionModel& f, const Point& x, double epsilon, NormChoice norm,
                                            const DirectionStrategy& strategy = {}) {
  require(epsilon >= 0.0, Errc::InvalidArgument, "epsilon must be >= 0");
  if (!f.value(x).is_finite()) throw Error(Errc::DomainViolation, "f(x) is not finite");
  DirectionResult r = search_direction(f, x, norm, strategy);
  const bool ok = r.value >= ExtReal(-epsilon);
  return {ok, std::move(r)};
}

// ---------------------------------------------------------------------------
// Rate audit: min_{k<=N} |d_k| <= sqrt((f(x_0) - f*) / (M (N + 1))) with
// M = min{1/2, mu / (2L)}, and per step f_{k+1} - f_k <= -M min{|d_k|, d_k^2}.

inline double rate_constant(double mu, double lipschitz) {
  require(mu > 0.0 && mu < 1.0, Errc::InvalidArgument, "mu must lie in (0, 1)");
  require(lipschitz >= 0.0, Errc::InvalidArgument, "L must be >= 0");
  if (lipschitz == 0.0) return 0.5;
  return std::min(0.5, mu / (2.0 * lipschitz));
}

/// Per-step check; `slack` absorbs rounding in f.
inline bool sufficient_decrease(const IterationRecord& r, double m, double slack = 0.0) {
  const double a = std::abs(r.dir_value);
  return r.f_next - r.f <= -m * std::min(a, a * a) + slack;
}

struct RateAudit {
  double m = 0.0;
  std::size_t n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool rate_holds = false;
  std::vector<bool> per_step;  // steps 0 .. min(N, steps) - 1
  bool holds = false;
};

inline double rounding_slack(double f) { return 1e-12 * std::max(1.0, std::abs(f)); }

inline RateAudit rate_audit(const Trace& trace, double f_star, double lipschitz, double mu, std::size_t n) {
  const auto d = trace.direction_values();
  if (d.empty() || n + 1 > d.size()) {
    throw Error(Errc::InsufficientTrace, "N = " + std::to_string(n) + " exceeds the " +
                                             std::to_string(d.size()) + " recorded direction values");
  }
  RateAudit a;
  a.m = rate_constant(mu, lipschitz);
  a.n = n;
  const double f0 = trace.records.empty() ? trace.final_f : trace.records.front().f;
  a.lhs = std::abs(d[0]);
  for (std::size_t k = 1; k <= n; ++k) a.lhs = std::min(a.lhs, std::abs(d[k]));
  a.rhs = std::sqrt(std::max(0.0, f0 - f_star) / (a.m * static_cast<double>(n + 1)));
  a.rate_holds = a.lhs <= a.rhs;
  const std::size_t steps = std::min(n, trace.records.size());
  a.per_step.reserve(steps);
  bool all = true;
  for (std::size_t k = 0; k < steps; ++k) {
    const auto& r = trace.records[k];
    const bool ok = sufficient_decrease(r, a.m, rounding_slack(r.f));
    a.per_step.push_back(ok);
    all = all && ok;
  }
  a.holds = a.rate_holds && all;
  return a;
}

/// Both sides of the rate bound for every N from 0 to the last direction value,
/// in one pass, plus the per-step decrease checks.
struct RateSweep {
  double m = 0.0;
  std::vector<double> lhs, rhs;
  std::vector<bool> per_step;
  bool holds = false;
};

inline RateSweep rate_sweep(const Trace& trace, double f_star, double lipschitz, double mu) {
  const auto d = trace.direction_values();
  if (d.empty()) throw Error(Errc::InsufficientTrace, "trace has no direction values");
  RateSweep s;
  s.m = rate_constant(mu, lipschitz);
  const double f0 = trace.records.empty() ? trace.final_f : trace.records.front().f;
  bool ok = true;
  double running = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < d.size(); ++n) {
    running = std::min(running, std::abs(d[n]));
    s.lhs.push_back(running);
    s.rhs.push_back(std::sqrt(std::max(0.0, f0 - f_star) / (s.m * static_cast<double>(n + 1))));
    ok = ok && s.lhs.back() <= s.rhs.back();
  }
  for (const auto& r : trace.records) {
    s.per_step.push_back(sufficient_decrease(r, s.m, rounding_slack(r.f)));
    ok = ok && s.per_step.back();
  }
  s.holds = ok;
  return s;
}

}  // namespace subdiff
