#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"

namespace subdiff {
namespace {

using testing::ext_near;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(ExtReal, FiniteAddition) {
  EXPECT_EQ(ext_add(2.0, 3.0), ExtReal(5.0));
}

TEST(ExtReal, InfinityAbsorbsFinite) {
  EXPECT_TRUE(ext_add(ExtReal::pos_inf(), -7.0).is_pos_inf());
  EXPECT_TRUE(ext_add(-7.0, ExtReal::neg_inf()).is_neg_inf());
  EXPECT_TRUE(ext_add(ExtReal::pos_inf(), ExtReal::pos_inf()).is_pos_inf());
}

TEST(ExtReal, OppositeInfinitiesAreRejected) {
  try {
    ext_add(ExtReal::pos_inf(), ExtReal::neg_inf());
    FAIL() << "expected IndeterminateSum";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IndeterminateSum);
  }
  EXPECT_THROW(ext_add(ExtReal::neg_inf(), ExtReal::pos_inf()), Error);
}

TEST(ExtReal, NanIsRejected) {
  EXPECT_THROW(ExtReal(std::nan("")), Error);
}

TEST(ExtReal, TotalOrder) {
  const ExtReal lo = ExtReal::neg_inf(), hi = ExtReal::pos_inf();
  for (double a : {-1e300, -1.0, 0.0, 2.5, 1e300}) {
    EXPECT_LT(lo, ExtReal(a));
    EXPECT_LT(ExtReal(a), hi);
  }
  EXPECT_LT(ExtReal(1.0), ExtReal(2.0));
  EXPECT_EQ(ExtReal(kInf), hi);
  EXPECT_EQ(ExtReal(-kInf), lo);
}

TEST(ExtReal, ScalePositive) {
  EXPECT_EQ(scale_positive(3.0, 2.0), ExtReal(6.0));
  EXPECT_TRUE(scale_positive(3.0, ExtReal::pos_inf()).is_pos_inf());
  EXPECT_THROW(scale_positive(0.0, 1.0), Error);
  EXPECT_THROW(scale_positive(-1.0, 1.0), Error);
}

TEST(ExtReal, ValueOfInfinityThrows) {
  EXPECT_THROW((void)ExtReal::pos_inf().value(), Error);
  EXPECT_EQ(ExtReal::pos_inf().to_double(), kInf);
}

TEST(PointTest, RejectsNonFinite) {
  EXPECT_THROW(Point({1.0, std::nan("")}), Error);
  EXPECT_THROW(Point({kInf}), Error);
}

TEST(PointTest, ArithmeticAndNorms) {
  const Point a{3.0, -4.0}, b{1.0, 1.0};
  EXPECT_EQ(a + b, (Point{4.0, -3.0}));
  EXPECT_EQ(a - b, (Point{2.0, -5.0}));
  EXPECT_EQ(2.0 * a, (Point{6.0, -8.0}));
  EXPECT_DOUBLE_EQ(norm2(a), 5.0);
  EXPECT_DOUBLE_EQ(norm1(a), 7.0);
  EXPECT_DOUBLE_EQ(norm_inf(a), 4.0);
  EXPECT_DOUBLE_EQ(dot(a, b), -1.0);
}

TEST(PointTest, DimensionMismatch) {
  try {
    (void)(Point{1.0} + Point{1.0, 2.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
  }
}

TEST(PointTest, UnitAndStream) {
  EXPECT_EQ(Point::unit(3, 1, -1.0), (Point{0.0, -1.0, 0.0}));
  std::ostringstream os;
  os << Point{1.0, 2.5};
  EXPECT_EQ(os.str(), "(1, 2.5)");
}

TEST(Homogeneity, L1Example) {
  const auto f = l1_norm(3);
  const Point x{1.0, -1.0, 0.0}, w{2.0, 1.0, -3.0};
  EXPECT_TRUE(ext_near(f->subderivative(x, 2.0 * w), 8.0, 0.0));
  EXPECT_TRUE(homogeneity_check(*f, x, w, 2.0));
}

TEST(Homogeneity, ZeroDirection) {
  const auto f = sum({half_squared_norm(2), neg_l1_norm(2)});
  EXPECT_TRUE(homogeneity_check(*f, Point{0.3, -2.0}, Point::zeros(2), 5.0));
}

TEST(Homogeneity, InfiniteOnBothSides) {
  const auto f = zero_norm(2);
  EXPECT_TRUE(homogeneity_check(*f, Point{1.0, 0.0}, Point{0.0, 1.0}, 3.0));
}

TEST(Homogeneity, DetectsViolation) {
  const LambdaModel bad(1, "bad", [](const Point& x) { return x[0]; },
                        [](const Point&, const Point& w) { return w[0] * w[0]; });
  EXPECT_FALSE(homogeneity_check(bad, Point{0.0}, Point{1.0}, 2.0));
  EXPECT_FALSE(homogeneity_check(bad, Point{0.0}, Point{1.0}, 0.0));
}

TEST(LambdaModelTest, SubderivativeOutsideDomainIsRejected) {
  const LambdaModel indicator(
      1, "indicator", [](const Point& x) { return x[0] >= 0.0 ? ExtReal(0.0) : ExtReal::pos_inf(); },
      [](const Point&, const Point& w) { return w[0] >= 0.0 ? ExtReal(0.0) : ExtReal::pos_inf(); });
  EXPECT_TRUE(indicator.subderivative(Point{0.0}, Point{-1.0}).is_pos_inf());
  try {
    (void)indicator.subderivative(Point{-1.0}, Point{1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DomainViolation);
  }
}

TEST(ScalarPartTest, TwoSidedAndAlgebra) {
  const auto g = ScalarPart::two_sided(2.0, -1.0);
  EXPECT_DOUBLE_EQ(g(3.0), 6.0);
  EXPECT_DOUBLE_EQ(g(-3.0), 3.0);
  const auto h = g + ScalarPart::linear(1.0);
  EXPECT_TRUE(h.piecewise_linear());
  EXPECT_DOUBLE_EQ(h(-1.0), 0.0);
  const auto c = 2.0 * ScalarPart::custom([](double t) { return t * t; });
  EXPECT_FALSE(c.piecewise_linear());
  EXPECT_DOUBLE_EQ(c(3.0), 18.0);
}

TEST(Maps, ReluSemiderivativeAtKink) {
  EXPECT_EQ(relu_semiderivative(0.0, -2.0), 0.0);
  EXPECT_EQ(relu_semiderivative(0.0, 2.0), 2.0);
  EXPECT_EQ(relu_semiderivative(-1.0, 2.0), 0.0);
  EXPECT_EQ(relu_semiderivative(1.0, -2.0), -2.0);
}

TEST(Maps, AffineJacobianIsLinear) {
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  const auto f = affine_map(a, Vector::Ones(2));
  const Point x{0.5, -1.0}, u{1.0, 0.0}, v{0.0, 2.0};
  EXPECT_EQ(f->jacobian_apply(x, u + v), f->jacobian_apply(x, u) + f->jacobian_apply(x, v));
  EXPECT_EQ(f->eval(x), (Point{-0.5, -1.5}));
  EXPECT_EQ(f->semiderivative(x, u), f->jacobian_apply(x, u));
}

TEST(Maps, SquareMapDifferenceQuotientConverges) {
  const auto f = square_map(2);
  const Point x{1.5, -0.5}, w{1.0, 2.0};
  const Point exact = f->jacobian_apply(x, w);
  double prev = kInf;
  for (double t = 1e-1; t > 1e-6; t *= 0.1) {
    const Vector q = (f->eval(x + t * w).vec() - f->eval(x).vec()) / t;
    const double err = (q - exact.vec()).norm();
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(ErrorCodes, NamesAreStable) {
  EXPECT_EQ(to_string(Errc::BacktrackExhausted), "BacktrackExhausted");
  const Error e(Errc::NoGradient, "x");
  EXPECT_EQ(std::string(e.what()), "NoGradient: x");
}

}  // namespace
}  // namespace subdiff
