#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subdiff/error.hpp"
#include "subdiff/ext_real.hpp"
#include "subdiff/point.hpp"

namespace subdiff {

class ProxFriendly;

/// One coordinate term g_i of a separable subderivative. Positively homogeneous
/// scalar maps are exactly the two-slope lines; `general` covers anything else.
struct ScalarPart {
  double right_slope = 0.0;  // g(t) = right_slope * t for t >= 0
  double left_slope = 0.0;   // g(t) = left_slope * t for t < 0
  std::function<double(double)> general;

  static ScalarPart linear(double slope) { return {slope, slope, {}}; }
  static ScalarPart two_sided(double right, double left) { return {right, left, {}}; }
  static ScalarPart custom(std::function<double(double)> g) { return {0.0, 0.0, std::move(g)}; }

  bool piecewise_linear() const noexcept { return !general; }

  double operator()(double t) const {
    if (general) return general(t);
    return t >= 0.0 ? right_slope * t : left_slope * t;
  }

  friend ScalarPart operator+(const ScalarPart& a, const ScalarPart& b) {
    if (a.piecewise_linear() && b.piecewise_linear()) {
      return two_sided(a.right_slope + b.right_slope, a.left_slope + b.left_slope);
    }
    return custom([a, b](double t) { return a(t) + b(t); });
  }

  friend ScalarPart operator*(double lambda, const ScalarPart& a) {
    if (a.piecewise_linear()) return two_sided(lambda * a.right_slope, lambda * a.left_slope);
    return custom([lambda, a](double t) { return lambda * a(t); });
  }
};

/// d f(x)(w) = <gradient, w> + sum_i parts[i](w_i) at one base point x.
struct SeparableForm {
  Point gradient;
  std::vector<ScalarPart> parts;

  double evaluate(const Point& w) const {
    double total = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) total += gradient[i] * w[i] + parts[i](w[i]);
    return total;
  }
};

/// The oracle contract every objective implements. Implementations are
/// immutable after construction and safe to share across threads.
class FunctionModel {
 public:
  virtual ~FunctionModel() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::string name() const = 0;

  virtual ExtReal value(const Point& x) const = 0;

  /// The lower directional derivative d f(x)(w). Only defined where value(x) is finite.
  virtual ExtReal subderivative(const Point& x, const Point& w) const = 0;

  virtual bool semi_differentiable() const { return false; }
  virtual bool directionally_lower_regular() const { return semi_differentiable(); }
  virtual std::optional<double> descent_constant() const { return std::nullopt; }
  virtual std::optional<double> lower_bound() const { return std::nullopt; }

  // Structure hooks consumed by the direction-search solvers.

  /// w -> d f(x)(w) is concave for every x.
  virtual bool concave_subderivative() const { return false; }
  /// The gradient at x, when f is differentiable there.
  virtual std::optional<Point> gradient(const Point& /*x*/) const { return std::nullopt; }
  virtual std::optional<SeparableForm> separable_form(const Point& /*x*/) const { return std::nullopt; }
  /// Closed-form proximal data, when the model is a bundled prox-friendly function.
  virtual std::shared_ptr<const ProxFriendly> prox_friendly() const { return nullptr; }
};

using ModelPtr = std::shared_ptr<const FunctionModel>;

/// Capabilities of a user-built model.
struct ModelTraits {
  bool semi_differentiable = false;
  bool lower_regular = false;
  bool concave_subderivative = false;
  std::optional<double> descent_constant;
  std::optional<double> lower_bound;
};

/// Adapts callables to the FunctionModel contract. Rejects subderivative
/// queries at points where the value is +inf.
class LambdaModel final : public FunctionModel {
 public:
  using ValueFn = std::function<ExtReal(const Point&)>;
  using SubderivativeFn = std::function<ExtReal(const Point&, const Point&)>;

  LambdaModel(std::size_t n, std::string name, ValueFn value, SubderivativeFn subderivative,
              ModelTraits traits = {})
      : n_(n),
        name_(std::move(name)),
        value_(std::move(value)),
        subderivative_(std::move(subderivative)),
        traits_(traits) {
    require(n_ > 0, Errc::InvalidArgument, "model dimension must be positive");
  }

  std::size_t dimension() const override { return n_; }
  std::string name() const override { return name_; }

  ExtReal value(const Point& x) const override {
    require_dim(x, n_, "value");
    return value_(x);
  }

  ExtReal subderivative(const Point& x, const Point& w) const override {
    require_dim(x, n_, "subderivative point");
    require_dim(w, n_, "subderivative direction");
    if (!value_(x).is_finite()) {
      throw Error(Errc::DomainViolation, "subderivative requested where f(x) is not finite");
    }
    return subderivative_(x, w);
  }

  bool semi_differentiable() const override { return traits_.semi_differentiable; }
  bool directionally_lower_regular() const override {
    return traits_.lower_regular || traits_.semi_differentiable;
  }
  bool concave_subderivative() const override { return traits_.concave_subderivative; }
  std::optional<double> descent_constant() const override { return traits_.descent_constant; }
  std::optional<double> lower_bound() const override { return traits_.lower_bound; }

 private:
  std::size_t n_;
  std::string name_;
  ValueFn value_;
  SubderivativeFn subderivative_;
  ModelTraits traits_;
};

/// Sampled check of positive homogeneity: d f(x)(t w) == t d f(x)(w).
inline bool homogeneity_check(const FunctionModel& m, const Point& x, const Point& w, double t,
                              double tol = 1e-8) {
  if (!(t > 0.0)) return false;
  const ExtReal scaled = m.subderivative(x, t * w);
  const ExtReal base = m.subderivative(x, w);
  if (scaled.is_finite() && base.is_finite()) {
    return std::abs(scaled.value() - t * base.value()) <= tol;
  }
  return scaled.kind() == base.kind();
}

}  // namespace subdiff
