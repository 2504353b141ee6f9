#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <ostream>

#include "subdiff/error.hpp"

namespace subdiff {

/// A value in [-inf, +inf]. NaN is rejected at construction so the ordering
/// stays total; (+inf) + (-inf) raises IndeterminateSum instead of producing NaN.
class ExtReal {
 public:
  enum class Kind { NegInf, Finite, PosInf };

  ExtReal() = default;

  // Implicit on purpose: finite doubles and +-inf map onto the three tags.
  ExtReal(double v) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(v)) throw Error(Errc::DomainViolation, "NaN is not an extended real");
    if (std::isinf(v)) {
      kind_ = v > 0 ? Kind::PosInf : Kind::NegInf;
    } else {
      kind_ = Kind::Finite;
      value_ = v;
    }
  }

  static ExtReal pos_inf() { return ExtReal(Kind::PosInf); }
  static ExtReal neg_inf() { return ExtReal(Kind::NegInf); }

  Kind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == Kind::Finite; }
  bool is_pos_inf() const noexcept { return kind_ == Kind::PosInf; }
  bool is_neg_inf() const noexcept { return kind_ == Kind::NegInf; }

  /// The finite payload; DomainViolation on an infinity.
  double value() const {
    if (kind_ != Kind::Finite) throw Error(Errc::DomainViolation, "extended real is infinite");
    return value_;
  }

  /// Lossless view as a double, infinities included.
  double to_double() const noexcept {
    switch (kind_) {
      case Kind::NegInf: return -std::numeric_limits<double>::infinity();
      case Kind::PosInf: return std::numeric_limits<double>::infinity();
      case Kind::Finite: break;
    }
    return value_;
  }

  ExtReal operator-() const {
    switch (kind_) {
      case Kind::NegInf: return pos_inf();
      case Kind::PosInf: return neg_inf();
      case Kind::Finite: break;
    }
    return ExtReal(-value_);
  }

  friend std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b) noexcept {
    if (a.kind_ != b.kind_) return rank(a.kind_) <=> rank(b.kind_);
    if (a.kind_ != Kind::Finite) return std::partial_ordering::equivalent;
    return a.value_ <=> b.value_;
  }
  friend bool operator==(const ExtReal& a, const ExtReal& b) noexcept {
    return (a <=> b) == std::partial_ordering::equivalent;
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtReal& v) {
    switch (v.kind_) {
      case Kind::NegInf: return os << "-inf";
      case Kind::PosInf: return os << "+inf";
      case Kind::Finite: break;
    }
    return os << v.value_;
  }

 private:
  explicit ExtReal(Kind k) : kind_(k) {}
  static int rank(Kind k) noexcept { return static_cast<int>(k); }

  Kind kind_ = Kind::Finite;
  double value_ = 0.0;
};

inline ExtReal ext_add(const ExtReal& a, const ExtReal& b) {
  if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf())) {
    throw Error(Errc::IndeterminateSum, "(+inf) + (-inf)");
  }
  if (!a.is_finite()) return a;
  if (!b.is_finite()) return b;
  return ExtReal(a.value() + b.value());
}

inline ExtReal operator+(const ExtReal& a, const ExtReal& b) { return ext_add(a, b); }
inline ExtReal operator-(const ExtReal& a, const ExtReal& b) { return ext_add(a, -b); }

/// Scaling by a positive real; infinities are preserved.
inline ExtReal scale_positive(double t, const ExtReal& a) {
  if (!(t > 0.0)) throw Error(Errc::NonpositiveScale, "scale factor must be positive");
  if (!a.is_finite()) return a;
  return ExtReal(t * a.value());
}

}  // namespace subdiff
