#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subdiff/error.hpp"
#include "subdiff/point.hpp"

namespace subdiff {

/// A vector-valued map R^n -> R^m with a semi-derivative: the full limit of
/// (F(x + t w') - F(x)) / t as t -> 0+ and w' -> w.
class SemiDiffMap {
 public:
  virtual ~SemiDiffMap() = default;

  virtual std::size_t dimension_in() const = 0;
  virtual std::size_t dimension_out() const = 0;
  virtual Point eval(const Point& x) const = 0;
  virtual Point semiderivative(const Point& x, const Point& w) const = 0;
};

/// A continuously differentiable map. Its semi-derivative is the Jacobian action.
class SmoothMap : public SemiDiffMap {
 public:
  virtual Point jacobian_apply(const Point& x, const Point& w) const = 0;

  /// J(x)^T v, when the map can provide it.
  virtual std::optional<Point> jacobian_transpose_apply(const Point& /*x*/, const Point& /*v*/) const {
    return std::nullopt;
  }

  /// Lipschitz modulus of the derivative, if known.
  virtual std::optional<double> smoothness_constant() const { return std::nullopt; }

  Point semiderivative(const Point& x, const Point& w) const final { return jacobian_apply(x, w); }
};

using SemiDiffMapPtr = std::shared_ptr<const SemiDiffMap>;
using SmoothMapPtr = std::shared_ptr<const SmoothMap>;

/// x -> A x + b.
class AffineMap final : public SmoothMap {
 public:
  AffineMap(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
    require(a_.rows() == b_.size(), Errc::DimensionMismatch, "affine map: rows(A) != size(b)");
    require(a_.rows() > 0 && a_.cols() > 0, Errc::InvalidArgument, "affine map: empty matrix");
    require(a_.allFinite() && b_.allFinite(), Errc::DomainViolation, "affine map: non-finite data");
  }

  std::size_t dimension_in() const override { return static_cast<std::size_t>(a_.cols()); }
  std::size_t dimension_out() const override { return static_cast<std::size_t>(a_.rows()); }

  Point eval(const Point& x) const override {
    require_dim(x, dimension_in(), "affine map");
    return Point(Vector(a_ * x.vec() + b_));
  }
  Point jacobian_apply(const Point& x, const Point& w) const override {
    require_dim(x, dimension_in(), "affine map");
    require_dim(w, dimension_in(), "affine map direction");
    return Point(Vector(a_ * w.vec()));
  }
  std::optional<Point> jacobian_transpose_apply(const Point& /*x*/, const Point& v) const override {
    require_dim(v, dimension_out(), "affine map adjoint");
    return Point(Vector(a_.transpose() * v.vec()));
  }
  std::optional<double> smoothness_constant() const override { return 0.0; }

  const Matrix& matrix() const noexcept { return a_; }
  const Vector& offset() const noexcept { return b_; }

 private:
  Matrix a_;
  Vector b_;
};

inline SmoothMapPtr affine_map(Matrix a, Vector b) {
  return std::make_shared<AffineMap>(std::move(a), std::move(b));
}

inline SmoothMapPtr identity_map(std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(n);
  return affine_map(Matrix::Identity(dim, dim), Vector::Zero(dim));
}

/// Smooth map from callables.
class LambdaSmoothMap final : public SmoothMap {
 public:
  using EvalFn = std::function<Point(const Point&)>;
  using JacFn = std::function<Point(const Point&, const Point&)>;

  LambdaSmoothMap(std::size_t n, std::size_t m, EvalFn eval, JacFn jac,
                  std::optional<double> smoothness = std::nullopt)
      : n_(n), m_(m), eval_(std::move(eval)), jac_(std::move(jac)), smoothness_(smoothness) {}

  std::size_t dimension_in() const override { return n_; }
  std::size_t dimension_out() const override { return m_; }
  Point eval(const Point& x) const override {
    require_dim(x, n_, "smooth map");
    Point y = eval_(x);
    require_dim(y, m_, "smooth map output");
    return y;
  }
  Point jacobian_apply(const Point& x, const Point& w) const override {
    require_dim(x, n_, "smooth map");
    require_dim(w, n_, "smooth map direction");
    Point y = jac_(x, w);
    require_dim(y, m_, "smooth map jacobian output");
    return y;
  }
  std::optional<double> smoothness_constant() const override { return smoothness_; }

 private:
  std::size_t n_, m_;
  EvalFn eval_;
  JacFn jac_;
  std::optional<double> smoothness_;
};

inline SmoothMapPtr smooth_map(std::size_t n, std::size_t m, LambdaSmoothMap::EvalFn eval,
                               LambdaSmoothMap::JacFn jac, std::optional<double> smoothness = std::nullopt) {
  return std::make_shared<LambdaSmoothMap>(n, m, std::move(eval), std::move(jac), smoothness);
}

/// Semi-differentiable map from callables.
class LambdaSemiDiffMap final : public SemiDiffMap {
 public:
  using EvalFn = std::function<Point(const Point&)>;
  using SemiFn = std::function<Point(const Point&, const Point&)>;

  LambdaSemiDiffMap(std::size_t n, std::size_t m, EvalFn eval, SemiFn semi)
      : n_(n), m_(m), eval_(std::move(eval)), semi_(std::move(semi)) {}

  std::size_t dimension_in() const override { return n_; }
  std::size_t dimension_out() const override { return m_; }
  Point eval(const Point& x) const override {
    require_dim(x, n_, "semi-differentiable map");
    Point y = eval_(x);
    require_dim(y, m_, "semi-differentiable map output");
    return y;
  }
  Point semiderivative(const Point& x, const Point& w) const override {
    require_dim(x, n_, "semi-differentiable map");
    require_dim(w, n_, "semi-differentiable map direction");
    Point y = semi_(x, w);
    require_dim(y, m_, "semi-derivative output");
    return y;
  }

 private:
  std::size_t n_, m_;
  EvalFn eval_;
  SemiFn semi_;
};

inline SemiDiffMapPtr semidiff_map(std::size_t n, std::size_t m, LambdaSemiDiffMap::EvalFn eval,
                                   LambdaSemiDiffMap::SemiFn semi) {
  return std::make_shared<LambdaSemiDiffMap>(n, m, std::move(eval), std::move(semi));
}

/// Semi-derivative of max{0, u} at u in direction v.
inline double relu_semiderivative(double u, double v) {
  if (u > 0.0) return v;
  if (u < 0.0) return 0.0;
  return std::max(0.0, v);
}

/// Componentwise max{0, .}. At a zero coordinate the semi-derivative is max{0, v}.
inline SemiDiffMapPtr relu_map(std::size_t n) {
  return semidiff_map(
      n, n,
      [](const Point& x) { return Point(Vector(x.vec().cwiseMax(0.0))); },
      [](const Point& x, const Point& w) {
        Vector out(static_cast<Eigen::Index>(x.size()));
        for (std::size_t i = 0; i < x.size(); ++i) out[static_cast<Eigen::Index>(i)] = relu_semiderivative(x[i], w[i]);
        return Point(std::move(out));
      });
}

/// Componentwise |.|. At a zero coordinate the semi-derivative is |v|.
inline SemiDiffMapPtr abs_map(std::size_t n) {
  return semidiff_map(
      n, n,
      [](const Point& x) { return Point(Vector(x.vec().cwiseAbs())); },
      [](const Point& x, const Point& w) {
        Vector out(static_cast<Eigen::Index>(x.size()));
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double u = x[i], v = w[i];
          out[static_cast<Eigen::Index>(i)] = u > 0.0 ? v : (u < 0.0 ? -v : std::abs(v));
        }
        return Point(std::move(out));
      });
}

/// Componentwise square, a smooth map with derivative Lipschitz modulus 2.
inline SmoothMapPtr square_map(std::size_t n) {
  return smooth_map(
      n, n, [](const Point& x) { return Point(Vector(x.vec().array().square().matrix())); },
      [](const Point& x, const Point& w) { return Point(Vector(2.0 * x.vec().cwiseProduct(w.vec()))); },
      2.0);
}

}  // namespace subdiff
