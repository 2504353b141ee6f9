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
#include "subdiff/model.hpp"
#include "subdiff/moreau.hpp"
#include "subdiff/point.hpp"

namespace subdiff {

// ---------------------------------------------------------------------------
// Smooth objectives: d f(x)(w) = <grad f(x), w>.

class SmoothModel final : public FunctionModel {
 public:
  using ValueFn = std::function<double(const Point&)>;
  using GradFn = std::function<Point(const Point&)>;

  SmoothModel(std::size_t n, std::string name, ValueFn value, GradFn grad,
              std::optional<double> lipschitz = std::nullopt, std::optional<double> lower = std::nullopt,
              ProxFriendlyPtr prox = nullptr)
      : n_(n),
        name_(std::move(name)),
        value_(std::move(value)),
        grad_(std::move(grad)),
        lipschitz_(lipschitz),
        lower_(lower),
        prox_(std::move(prox)) {
    require(n_ > 0, Errc::InvalidArgument, "model dimension must be positive");
    require(!lipschitz_ || *lipschitz_ >= 0.0, Errc::InvalidArgument, "descent constant must be >= 0");
  }

  std::size_t dimension() const override { return n_; }
  std::string name() const override { return name_; }

  ExtReal value(const Point& x) const override {
    require_dim(x, n_, name_.c_str());
    return value_(x);
  }
  ExtReal subderivative(const Point& x, const Point& w) const override {
    require_dim(w, n_, name_.c_str());
    return dot(*gradient(x), w);
  }
  std::optional<Point> gradient(const Point& x) const override {
    require_dim(x, n_, name_.c_str());
    Point g = grad_(x);
    require_dim(g, n_, "gradient output");
    return g;
  }
  std::optional<SeparableForm> separable_form(const Point& x) const override {
    return SeparableForm{*gradient(x), std::vector<ScalarPart>(n_)};
  }

  bool semi_differentiable() const override { return true; }
  bool concave_subderivative() const override { return true; }
  std::optional<double> descent_constant() const override { return lipschitz_; }
  std::optional<double> lower_bound() const override { return lower_; }
  ProxFriendlyPtr prox_friendly() const override { return prox_; }

 private:
  std::size_t n_;
  std::string name_;
  ValueFn value_;
  GradFn grad_;
  std::optional<double> lipschitz_;
  std::optional<double> lower_;
  ProxFriendlyPtr prox_;
};

/// A differentiable objective from value and gradient callables. L, when
/// given, is the gradient's Lipschitz modulus and becomes the descent constant.
inline ModelPtr smooth_model(std::size_t n, SmoothModel::ValueFn value, SmoothModel::GradFn grad,
                             std::optional<double> lipschitz = std::nullopt, std::string name = "smooth") {
  return std::make_shared<SmoothModel>(n, std::move(name), std::move(value), std::move(grad), lipschitz);
}

/// 1/2 |x - c|^2.
inline ModelPtr half_squared_distance(Point center) {
  const std::size_t n = center.size();
  return std::make_shared<SmoothModel>(
      n, "half_sq_dist", [center](const Point& x) { return 0.5 * (x.vec() - center.vec()).squaredNorm(); },
      [center](const Point& x) { return x - center; }, 1.0, 0.0);
}

inline ModelPtr half_squared_norm(std::size_t n) { return half_squared_distance(Point::zeros(n)); }

/// <c, x>.
inline ModelPtr linear_model(Point c) {
  const std::size_t n = c.size();
  return std::make_shared<SmoothModel>(
      n, "linear", [c](const Point& x) { return dot(c, x); }, [c](const Point&) { return c; }, 0.0);
}

/// 1/2 x'Qx + q'x with Q symmetric. The descent constant is the spectral
/// radius of Q; the model is prox-friendly when Q is positive semidefinite.
inline ModelPtr quadratic_model(Matrix q_matrix, Vector q_vector) {
  require(q_matrix.rows() == q_matrix.cols() && q_matrix.rows() == q_vector.size() && q_vector.size() > 0,
          Errc::DimensionMismatch, "quadratic: Q must be square and match q");
  require(q_matrix.isApprox(q_matrix.transpose(), 1e-12), Errc::InvalidArgument, "quadratic: Q must be symmetric");
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(q_matrix, Eigen::EigenvaluesOnly);
  const double radius = eig.eigenvalues().cwiseAbs().maxCoeff();
  const bool psd = eig.eigenvalues().minCoeff() >= -1e-12 * std::max(1.0, radius);
  const auto n = static_cast<std::size_t>(q_vector.size());
  ProxFriendlyPtr prox = psd ? ProxFriendly::quadratic(q_matrix, q_vector) : nullptr;
  return std::make_shared<SmoothModel>(
      n, "quadratic",
      [q_matrix, q_vector](const Point& x) { return 0.5 * x.vec().dot(q_matrix * x.vec()) + q_vector.dot(x.vec()); },
      [q_matrix, q_vector](const Point& x) { return Point(Vector(q_matrix * x.vec() + q_vector)); }, radius,
      std::nullopt, std::move(prox));
}

/// 1/2 |A x - y|^2, with descent constant |A|_2^2 and lower bound 0.
inline ModelPtr least_squares(Matrix a, Vector y) {
  require(a.rows() == y.size() && a.rows() > 0 && a.cols() > 0, Errc::DimensionMismatch,
          "least squares: rows(A) != size(y)");
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(a.transpose() * a, Eigen::EigenvaluesOnly);
  const double lipschitz = std::max(0.0, eig.eigenvalues().maxCoeff());
  const auto n = static_cast<std::size_t>(a.cols());
  return std::make_shared<SmoothModel>(
      n, "least_squares", [a, y](const Point& x) { return 0.5 * (a * x.vec() - y).squaredNorm(); },
      [a, y](const Point& x) { return Point(Vector(a.transpose() * (a * x.vec() - y))); }, lipschitz, 0.0);
}

// ---------------------------------------------------------------------------
// lambda |x|_1 and its negation.

namespace detail {

inline ScalarPart l1_part(double xi, double lambda) {
  if (xi > 0.0) return ScalarPart::linear(lambda);
  if (xi < 0.0) return ScalarPart::linear(-lambda);
  return ScalarPart::two_sided(lambda, -lambda);
}

class L1Norm final : public FunctionModel {
 public:
  L1Norm(std::size_t n, double lambda, bool negated) : n_(n), lambda_(lambda), sign_(negated ? -1.0 : 1.0) {
    require(n_ > 0, Errc::InvalidArgument, "model dimension must be positive");
    require(lambda_ > 0.0 && std::isfinite(lambda_), Errc::InvalidArgument, "l1 weight must be positive");
  }

  std::size_t dimension() const override { return n_; }
  std::string name() const override { return sign_ > 0 ? "l1" : "neg_l1"; }

  ExtReal value(const Point& x) const override {
    require_dim(x, n_, "l1");
    return sign_ * lambda_ * norm1(x);
  }

  // Positive coordinates contribute lambda w_i, negative ones -lambda w_i,
  // zero ones lambda |w_i|; the negated model flips every term.
  ExtReal subderivative(const Point& x, const Point& w) const override {
    require_dim(x, n_, "l1");
    require_dim(w, n_, "l1 direction");
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double term = x[i] > 0.0 ? w[i] : (x[i] < 0.0 ? -w[i] : std::abs(w[i]));
      total += sign_ * lambda_ * term;
    }
    return total;
  }

  std::optional<Point> gradient(const Point& x) const override {
    require_dim(x, n_, "l1");
    Vector g(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) {
      if (x[i] == 0.0) return std::nullopt;
      g[static_cast<Eigen::Index>(i)] = sign_ * lambda_ * (x[i] > 0.0 ? 1.0 : -1.0);
    }
    return Point(std::move(g));
  }

  std::optional<SeparableForm> separable_form(const Point& x) const override {
    require_dim(x, n_, "l1");
    SeparableForm form{Point::zeros(n_), {}};
    for (std::size_t i = 0; i < n_; ++i) form.parts.push_back(sign_ * detail::l1_part(x[i], lambda_));
    return form;
  }

  bool semi_differentiable() const override { return true; }
  bool concave_subderivative() const override { return sign_ < 0; }
  std::optional<double> descent_constant() const override {
    if (sign_ < 0) return 0.0;
    return std::nullopt;
  }
  std::optional<double> lower_bound() const override {
    if (sign_ > 0) return 0.0;
    return std::nullopt;
  }
  ProxFriendlyPtr prox_friendly() const override {
    if (sign_ > 0) return ProxFriendly::separable(n_, l1_scalar_prox(lambda_));
    return nullptr;
  }

 private:
  std::size_t n_;
  double lambda_;
  double sign_;
};

}  // namespace detail

/// lambda |x|_1. Convex, so no descent constant is advertised.
inline ModelPtr l1_norm(std::size_t n, double lambda = 1.0) {
  return std::make_shared<detail::L1Norm>(n, lambda, false);
}

/// -lambda |x|_1. Concave and finite, hence descent constant 0.
inline ModelPtr neg_l1_norm(std::size_t n, double lambda = 1.0) {
  return std::make_shared<detail::L1Norm>(n, lambda, true);
}

// ---------------------------------------------------------------------------
// |A x + b|_0.

/// f(x) = |Ax + b|_0. d f(x)(w) is 0 when supp(Aw) is inside supp(Ax + b) and
/// +inf otherwise. The support uses |y_i| > cutoff; the default cutoff 0 is
/// the exact combinatorial definition.
class ZeroNormComposite final : public FunctionModel {
 public:
  ZeroNormComposite(Matrix a, Vector b, double cutoff = 0.0) : a_(std::move(a)), b_(std::move(b)), cutoff_(cutoff) {
    require(a_.rows() == b_.size() && a_.rows() > 0 && a_.cols() > 0, Errc::DimensionMismatch,
            "zero norm: rows(A) != size(b)");
    require(cutoff_ >= 0.0, Errc::InvalidArgument, "support cutoff must be >= 0");
  }

  std::size_t dimension() const override { return static_cast<std::size_t>(a_.cols()); }
  std::string name() const override { return "zero_norm"; }

  ExtReal value(const Point& x) const override {
    require_dim(x, dimension(), "zero norm");
    const Vector y = a_ * x.vec() + b_;
    double count = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) count += in_support(y[i]) ? 1.0 : 0.0;
    return count;
  }

  ExtReal subderivative(const Point& x, const Point& w) const override {
    require_dim(x, dimension(), "zero norm");
    require_dim(w, dimension(), "zero norm direction");
    const Vector base = a_ * x.vec() + b_;
    const Vector dir = a_ * w.vec();
    for (Eigen::Index i = 0; i < dir.size(); ++i) {
      if (in_support(dir[i]) && !in_support(base[i])) return ExtReal::pos_inf();
    }
    return 0.0;
  }

  bool semi_differentiable() const override { return false; }
  bool directionally_lower_regular() const override { return true; }
  std::optional<double> lower_bound() const override { return 0.0; }

  ProxFriendlyPtr prox_friendly() const override {
    const bool plain = a_.rows() == a_.cols() && a_.isIdentity(0.0) && b_.isZero(0.0) && cutoff_ == 0.0;
    if (plain) return ProxFriendly::separable(dimension(), l0_scalar_prox(1.0));
    return nullptr;
  }

 private:
  bool in_support(double v) const { return std::abs(v) > cutoff_; }

  Matrix a_;
  Vector b_;
  double cutoff_;
};

inline ModelPtr zero_norm_composite(Matrix a, Vector b, double cutoff = 0.0) {
  return std::make_shared<ZeroNormComposite>(std::move(a), std::move(b), cutoff);
}

/// |x|_0 on R^n.
inline ModelPtr zero_norm(std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(n);
  return zero_norm_composite(Matrix::Identity(dim, dim), Vector::Zero(dim));
}

}  // namespace subdiff
