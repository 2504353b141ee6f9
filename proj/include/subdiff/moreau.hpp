#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "subdiff/error.hpp"
#include "subdiff/model.hpp"
#include "subdiff/point.hpp"

namespace subdiff {

/// A scalar function with a closed-form proximal map. `prox(x, r)` returns every
/// minimizer of y -> (x - y)^2 / (2r) + value(y), in ascending order.
struct ScalarProx {
  std::string name;
  std::function<double(double)> value;
  std::function<std::vector<double>(double, double)> prox;
  double infimum = 0.0;
};

/// lambda |y|; the prox is soft thresholding.
inline ScalarProx l1_scalar_prox(double lambda) {
  require(lambda > 0.0, Errc::InvalidArgument, "l1 weight must be positive");
  return {"l1", [lambda](double y) { return lambda * std::abs(y); },
          [lambda](double x, double r) {
            const double shrink = std::max(std::abs(x) - r * lambda, 0.0);
            return std::vector<double>{std::copysign(shrink, x) + 0.0};
          },
          0.0};
}

/// cost * [y != 0]; the prox is hard thresholding at |x| = sqrt(2 r cost),
/// where both 0 and x are minimizers.
inline ScalarProx l0_scalar_prox(double cost = 1.0) {
  require(cost > 0.0, Errc::InvalidArgument, "l0 cost must be positive");
  return {"l0", [cost](double y) { return y != 0.0 ? cost : 0.0; },
          [cost](double x, double r) {
            const double keep = x * x / (2.0 * r);
            if (keep < cost || x == 0.0) return std::vector<double>{0.0};
            if (keep > cost) return std::vector<double>{x};
            return x < 0.0 ? std::vector<double>{x, 0.0} : std::vector<double>{0.0, x};
          },
          0.0};
}

/// Inner functions with a closed-form proximal map: separable sums of one
/// scalar prox, or the convex quadratic 1/2 y'Qy + q'y.
class ProxFriendly {
 public:
  struct Separable {
    std::size_t n;
    ScalarProx scalar;
  };
  struct Quadratic {
    Matrix q_matrix;
    Vector q_vector;
  };

  static std::shared_ptr<const ProxFriendly> separable(std::size_t n, ScalarProx scalar) {
    require(n > 0, Errc::InvalidArgument, "dimension must be positive");
    require(static_cast<bool>(scalar.value) && static_cast<bool>(scalar.prox), Errc::ProxUnavailable,
            "scalar prox is missing its callables");
    return std::shared_ptr<const ProxFriendly>(new ProxFriendly(Separable{n, std::move(scalar)}));
  }

  static std::shared_ptr<const ProxFriendly> quadratic(Matrix q_matrix, Vector q_vector) {
    require(q_matrix.rows() == q_matrix.cols() && q_matrix.rows() == q_vector.size() && q_vector.size() > 0,
            Errc::DimensionMismatch, "quadratic inner: Q must be square and match q");
    return std::shared_ptr<const ProxFriendly>(
        new ProxFriendly(Quadratic{std::move(q_matrix), std::move(q_vector)}));
  }

  std::size_t dimension() const {
    if (const auto* s = std::get_if<Separable>(&inner_)) return s->n;
    return static_cast<std::size_t>(std::get<Quadratic>(inner_).q_vector.size());
  }

  const std::variant<Separable, Quadratic>& inner() const noexcept { return inner_; }

 private:
  explicit ProxFriendly(std::variant<Separable, Quadratic> inner) : inner_(std::move(inner)) {}
  std::variant<Separable, Quadratic> inner_;
};

using ProxFriendlyPtr = std::shared_ptr<const ProxFriendly>;

namespace detail {

// e_r f for separable f = sum_i s(x_i). The envelope is x^2/(2r) plus a concave
// infimum of affine functions, so its directional derivative is
// min over prox points p of (x - p) w / r, coordinatewise.
class SeparableMoreau final : public FunctionModel {
 public:
  SeparableMoreau(ProxFriendly::Separable inner, double r) : inner_(std::move(inner)), r_(r) {}

  std::size_t dimension() const override { return inner_.n; }
  std::string name() const override { return "moreau(" + inner_.scalar.name + ")"; }

  ExtReal value(const Point& x) const override {
    require_dim(x, inner_.n, "moreau envelope");
    double total = 0.0;
    for (std::size_t i = 0; i < inner_.n; ++i) {
      const auto p = prox_points(x[i]);
      total += (x[i] - p.front()) * (x[i] - p.front()) / (2.0 * r_) + inner_.scalar.value(p.front());
    }
    return total;
  }

  ExtReal subderivative(const Point& x, const Point& w) const override {
    require_dim(x, inner_.n, "moreau envelope");
    require_dim(w, inner_.n, "moreau envelope direction");
    double total = 0.0;
    for (std::size_t i = 0; i < inner_.n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double p : prox_points(x[i])) best = std::min(best, (x[i] - p) * w[i] / r_);
      total += best;
    }
    return total;
  }

  bool semi_differentiable() const override { return true; }
  bool concave_subderivative() const override { return true; }
  std::optional<double> descent_constant() const override { return 1.0 / r_; }
  std::optional<double> lower_bound() const override {
    return static_cast<double>(inner_.n) * inner_.scalar.infimum;
  }

  std::optional<Point> gradient(const Point& x) const override {
    require_dim(x, inner_.n, "moreau envelope");
    Vector g(static_cast<Eigen::Index>(inner_.n));
    for (std::size_t i = 0; i < inner_.n; ++i) {
      const auto p = prox_points(x[i]);
      if (p.size() != 1) return std::nullopt;
      g[static_cast<Eigen::Index>(i)] = (x[i] - p.front()) / r_;
    }
    return Point(std::move(g));
  }

  std::optional<SeparableForm> separable_form(const Point& x) const override {
    require_dim(x, inner_.n, "moreau envelope");
    SeparableForm form{Point::zeros(inner_.n), {}};
    form.parts.reserve(inner_.n);
    for (std::size_t i = 0; i < inner_.n; ++i) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (double p : prox_points(x[i])) {
        lo = std::min(lo, (x[i] - p) / r_);
        hi = std::max(hi, (x[i] - p) / r_);
      }
      form.parts.push_back(ScalarPart::two_sided(lo, hi));
    }
    return form;
  }

 private:
  std::vector<double> prox_points(double xi) const {
    auto p = inner_.scalar.prox(xi, r_);
    if (p.empty()) throw Error(Errc::ProxUnavailable, "scalar prox returned no minimizer");
    return p;
  }

  ProxFriendly::Separable inner_;
  double r_;
};

// e_r of 1/2 y'Qy + q'y: the unique prox is (I + rQ)^{-1}(x - r q), the
// envelope is C^1 and the subderivative is the gradient pairing.
class QuadraticMoreau final : public FunctionModel {
 public:
  QuadraticMoreau(ProxFriendly::Quadratic inner, double r) : inner_(std::move(inner)), r_(r) {
    const auto n = inner_.q_vector.size();
    system_ = (Matrix::Identity(n, n) + r_ * inner_.q_matrix).llt();
    require(system_.info() == Eigen::Success, Errc::InvalidArgument,
            "quadratic inner is not prox-bounded for this r (I + rQ not positive definite)");
  }

  std::size_t dimension() const override { return static_cast<std::size_t>(inner_.q_vector.size()); }
  std::string name() const override { return "moreau(quadratic)"; }

  ExtReal value(const Point& x) const override {
    const Vector y = prox(x);
    return (x.vec() - y).squaredNorm() / (2.0 * r_) + 0.5 * y.dot(inner_.q_matrix * y) + inner_.q_vector.dot(y);
  }
  ExtReal subderivative(const Point& x, const Point& w) const override {
    require_dim(w, dimension(), "moreau envelope direction");
    return dot(*gradient(x), w);
  }
  std::optional<Point> gradient(const Point& x) const override {
    return Point(Vector((x.vec() - prox(x)) / r_));
  }
  std::optional<SeparableForm> separable_form(const Point& x) const override {
    return SeparableForm{*gradient(x), std::vector<ScalarPart>(dimension())};
  }

  bool semi_differentiable() const override { return true; }
  bool concave_subderivative() const override { return true; }
  std::optional<double> descent_constant() const override { return 1.0 / r_; }

 private:
  Vector prox(const Point& x) const {
    require_dim(x, dimension(), "moreau envelope");
    return system_.solve(Vector(x.vec() - r_ * inner_.q_vector));
  }

  ProxFriendly::Quadratic inner_;
  double r_;
  Eigen::LLT<Matrix> system_;
};

}  // namespace detail

/// e_r f(x) = inf_y { |x - y|^2 / (2r) + f(y) } for a prox-friendly inner f.
/// The envelope has the descent property with constant 1/r.
inline ModelPtr moreau_envelope(const ProxFriendlyPtr& inner, double r) {
  require(static_cast<bool>(inner), Errc::ProxUnavailable, "no inner function");
  require(r > 0.0 && std::isfinite(r), Errc::InvalidArgument, "moreau parameter r must be positive");
  if (const auto* s = std::get_if<ProxFriendly::Separable>(&inner->inner())) {
    return std::make_shared<detail::SeparableMoreau>(*s, r);
  }
  return std::make_shared<detail::QuadraticMoreau>(std::get<ProxFriendly::Quadratic>(inner->inner()), r);
}

/// Envelope of a model that advertises closed-form prox data; ProxUnavailable otherwise.
inline ModelPtr moreau_envelope(const FunctionModel& inner, double r) {
  auto prox = inner.prox_friendly();
  if (!prox) throw Error(Errc::ProxUnavailable, "model '" + inner.name() + "' has no closed-form prox");
  return moreau_envelope(prox, r);
}

}  // namespace subdiff
