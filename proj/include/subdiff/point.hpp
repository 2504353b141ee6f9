#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "subdiff/error.hpp"

namespace subdiff {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A finite point (or direction) of R^n. Construction rejects NaN and +-inf,
/// so every Point handed to a model is a valid evaluation argument.
class Point {
 public:
  Point() = default;

  explicit Point(Vector coords) : coords_(std::move(coords)) { validate(); }

  Point(std::initializer_list<double> coords)
      : coords_(Eigen::Map<const Vector>(coords.begin(), static_cast<Eigen::Index>(coords.size()))) {
    validate();
  }

  explicit Point(std::span<const double> coords)
      : coords_(Eigen::Map<const Vector>(coords.data(), static_cast<Eigen::Index>(coords.size()))) {
    validate();
  }

  static Point zeros(std::size_t n) { return Point(Vector::Zero(static_cast<Eigen::Index>(n))); }

  static Point unit(std::size_t n, std::size_t i, double sign = 1.0) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
    v[static_cast<Eigen::Index>(i)] = sign;
    return Point(std::move(v));
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(coords_.size()); }
  double operator[](std::size_t i) const { return coords_[static_cast<Eigen::Index>(i)]; }
  const Vector& vec() const noexcept { return coords_; }
  std::span<const double> span() const noexcept { return {coords_.data(), size()}; }
  std::vector<double> to_vector() const { return {coords_.data(), coords_.data() + coords_.size()}; }

  bool is_zero() const noexcept { return coords_.isZero(0.0); }

  friend Point operator+(const Point& a, const Point& b) {
    check_same(a, b);
    return Point(Vector(a.coords_ + b.coords_));
  }
  friend Point operator-(const Point& a, const Point& b) {
    check_same(a, b);
    return Point(Vector(a.coords_ - b.coords_));
  }
  friend Point operator-(const Point& a) { return Point(Vector(-a.coords_)); }
  friend Point operator*(double t, const Point& a) { return Point(Vector(t * a.coords_)); }

  friend bool operator==(const Point& a, const Point& b) {
    return a.size() == b.size() && a.coords_ == b.coords_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Point& p) {
    os << '(';
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    return os << ')';
  }

  static void check_same(const Point& a, const Point& b) {
    if (a.size() != b.size()) {
      throw Error(Errc::DimensionMismatch,
                  "dimension " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
  }

 private:
  void validate() const {
    if (!coords_.allFinite()) throw Error(Errc::DomainViolation, "point has a non-finite coordinate");
  }

  Vector coords_;
};

inline double dot(const Point& a, const Point& b) {
  Point::check_same(a, b);
  return a.vec().dot(b.vec());
}

inline double norm2(const Point& a) { return a.vec().norm(); }
inline double norm1(const Point& a) { return a.vec().lpNorm<1>(); }
inline double norm_inf(const Point& a) { return a.size() ? a.vec().lpNorm<Eigen::Infinity>() : 0.0; }

inline void require_dim(const Point& p, std::size_t n, const char* what) {
  if (p.size() != n) {
    throw Error(Errc::DimensionMismatch, std::string(what) + ": expected dimension " +
                                             std::to_string(n) + ", got " + std::to_string(p.size()));
  }
}

}  // namespace subdiff
