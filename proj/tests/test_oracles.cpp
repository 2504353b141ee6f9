#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

namespace subdiff {
namespace {

using testing::ext_near;
using testing::grid_min;

TEST(L1Norm, SignDecomposition) {
  const auto f = l1_norm(3);
  const Point x{1.0, -1.0, 0.0}, w{2.0, 1.0, -3.0};
  EXPECT_TRUE(ext_near(f->subderivative(x, w), 4.0, 0.0));
  EXPECT_NEAR(testing::quotient(*f, x, w, 1e-7), 4.0, 1e-7);
}

TEST(L1Norm, ZeroDirectionAndWeightedKink) {
  const auto f = l1_norm(3);
  EXPECT_TRUE(ext_near(f->subderivative(Point{1.0, -1.0, 0.0}, Point::zeros(3)), 0.0, 0.0));
  const auto g = l1_norm(2, 2.0);
  EXPECT_TRUE(ext_near(g->subderivative(Point::zeros(2), Point::unit(2, 0)), 2.0, 0.0));
  EXPECT_NEAR(testing::quotient(*g, Point::zeros(2), Point::unit(2, 0), 0.25), 2.0, 1e-15);
}

TEST(L1Norm, Flags) {
  const auto f = l1_norm(2);
  EXPECT_TRUE(f->semi_differentiable());
  EXPECT_FALSE(f->descent_constant());
  ASSERT_TRUE(f->separable_form(Point{0.0, 1.0}));
  EXPECT_THROW(l1_norm(2, 0.0), Error);
}

TEST(NegL1Norm, Examples) {
  const double lambda = 1.5;
  const auto f = neg_l1_norm(2, lambda);
  EXPECT_TRUE(ext_near(f->subderivative(Point::zeros(2), Point::unit(2, 0)), -lambda, 0.0));
  EXPECT_TRUE(ext_near(f->subderivative(Point{0.3, 0.0}, Point::zeros(2)), 0.0, 0.0));
  const auto g = neg_l1_norm(2);
  const Point x{2.0, 0.0}, w{0.0, 1.0};
  EXPECT_TRUE(ext_near(g->subderivative(x, w), -1.0, 0.0));
  EXPECT_TRUE(ext_near(fd_subderivative(*g, x, w).estimate, -1.0, 1e-6));
  EXPECT_DOUBLE_EQ(*g->descent_constant(), 0.0);
  EXPECT_TRUE(g->concave_subderivative());
}

TEST(ZeroNorm, SupportInclusion) {
  const auto f = zero_norm(2);
  EXPECT_TRUE(ext_near(f->subderivative(Point{1.0, 0.0}, Point{1.0, 0.0}), 0.0, 0.0));
  EXPECT_TRUE(f->subderivative(Point{1.0, 0.0}, Point{0.0, 1.0}).is_pos_inf());
  EXPECT_TRUE(ext_near(f->subderivative(Point{0.0, 3.0}, Point::zeros(2)), 0.0, 0.0));
  EXPECT_FALSE(f->semi_differentiable());
  EXPECT_TRUE(f->directionally_lower_regular());
}

TEST(ZeroNorm, QuotientIsCountOverT) {
  const auto f = zero_norm(2);
  const Point x{1.0, 0.0}, w{0.0, 1.0};
  for (double t : {1e-1, 1e-3, 1e-6}) EXPECT_DOUBLE_EQ(testing::quotient(*f, x, w, t), 1.0 / t);
}

TEST(ZeroNorm, CompositeWithOffsetAndCutoff) {
  Matrix a(2, 2);
  a << 1, 1, 0, 1;
  const Vector b = Vector::Constant(2, -1.0);
  const auto f = zero_norm_composite(a, b);
  // A x + b = (0, 0) at x = (0, 1); any w with A w != 0 costs +inf.
  EXPECT_DOUBLE_EQ(f->value(Point{0.0, 1.0}).value(), 0.0);
  EXPECT_TRUE(f->subderivative(Point{0.0, 1.0}, Point{1.0, 0.0}).is_pos_inf());
  EXPECT_DOUBLE_EQ(f->value(Point{1.0, 1.0}).value(), 1.0);
  EXPECT_TRUE(ext_near(f->subderivative(Point{1.0, 1.0}, Point{1.0, 0.0}), 0.0, 0.0));
  EXPECT_DOUBLE_EQ(f->value(Point{2.0, 2.0}).value(), 2.0);
  EXPECT_TRUE(ext_near(f->subderivative(Point{2.0, 2.0}, Point{-1.0, 5.0}), 0.0, 0.0));
  const auto loose = zero_norm_composite(Matrix::Identity(2, 2), Vector::Zero(2), 1e-3);
  EXPECT_DOUBLE_EQ(loose->value(Point{1e-4, 1.0}).value(), 1.0);
}

TEST(Moreau, HuberValue) {
  const auto e = moreau_envelope(*l1_norm(1), 1.0);
  const auto [y, v] = grid_min([](double t) { return 0.5 * (2.0 - t) * (2.0 - t) + std::abs(t); }, -4.0, 4.0);
  EXPECT_NEAR(e->value(Point{2.0}).value(), 1.5, 1e-12);
  EXPECT_NEAR(e->value(Point{2.0}).value(), v, 1e-8);
  (void)y;
}

TEST(Moreau, MinimumOfEnvelope) {
  const auto e = moreau_envelope(*l1_norm(1), 1.0);
  EXPECT_TRUE(ext_near(e->value(Point{0.0}), 0.0, 0.0));
  EXPECT_TRUE(ext_near(e->subderivative(Point{0.0}, Point{1.0}), 0.0, 0.0));
  EXPECT_TRUE(ext_near(e->subderivative(Point{0.0}, Point{-1.0}), 0.0, 0.0));
}

TEST(Moreau, ZeroNormHardThreshold) {
  const double r = 0.5;
  const auto e = moreau_envelope(*zero_norm(1), r);
  const auto h = [r](double t) { return (0.5 - t) * (0.5 - t) / (2.0 * r) + (t != 0.0 ? 1.0 : 0.0); };
  auto [y, v] = grid_min(h, -2.0, 2.0);
  v = std::min(v, h(0.0));
  EXPECT_NEAR(e->value(Point{0.5}).value(), 0.25, 1e-15);
  EXPECT_NEAR(e->value(Point{0.5}).value(), v, 1e-9);
  EXPECT_DOUBLE_EQ(*e->descent_constant(), 1.0 / r);
}

TEST(Moreau, KinkAtThresholdIsConcave) {
  // sqrt(2 r) = 1 for r = 0.5: the envelope is min(x^2, 1), a concave kink at 1.
  const auto e = moreau_envelope(*zero_norm(1), 0.5);
  EXPECT_TRUE(ext_near(e->subderivative(Point{1.0}, Point{1.0}), 0.0, 1e-15));
  EXPECT_TRUE(ext_near(e->subderivative(Point{1.0}, Point{-1.0}), -2.0, 1e-15));
  EXPECT_TRUE(ext_near(fd_subderivative(*e, Point{1.0}, Point{-1.0}).estimate, -2.0, 1e-6));
}

TEST(Moreau, QuadraticInner) {
  Matrix q(2, 2);
  q << 2, 0, 0, 4;
  const auto inner = quadratic_model(q, Vector::Zero(2));
  const auto e = moreau_envelope(*inner, 0.5);
  // Diagonal: e(x) = sum q_i x_i^2 / (2 (1 + r q_i)).
  const Point x{1.0, 1.0};
  EXPECT_NEAR(e->value(x).value(), 2.0 / 4.0 + 4.0 / 6.0, 1e-12);
  EXPECT_NEAR(e->subderivative(x, Point{1.0, 0.0}).value(), 2.0 / 2.0, 1e-12);
}

TEST(Moreau, Unavailable) {
  try {
    moreau_envelope(*neg_l1_norm(2), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ProxUnavailable);
  }
  Matrix q(1, 1);
  q << -1;
  EXPECT_THROW(moreau_envelope(*quadratic_model(q, Vector::Zero(1)), 1.0), Error);
}

TEST(SmoothModelTest, GradientPairing) {
  const auto f = half_squared_norm(2);
  const Point x{3.0, 4.0};
  EXPECT_TRUE(ext_near(f->subderivative(x, Point{1.0, 0.0}), 3.0, 0.0));
  EXPECT_TRUE(ext_near(f->subderivative(x, Point::zeros(2)), 0.0, 0.0));
  EXPECT_TRUE(ext_near(f->subderivative(x, Point{2.0, 0.0}), 6.0, 0.0));
  EXPECT_DOUBLE_EQ(*f->descent_constant(), 1.0);
}

TEST(SmoothModelTest, LeastSquaresConstant) {
  Matrix a(2, 2);
  a << 3, 0, 0, 1;
  const auto f = least_squares(a, Vector::Zero(2));
  EXPECT_NEAR(*f->descent_constant(), 9.0, 1e-12);
  EXPECT_DOUBLE_EQ(*f->lower_bound(), 0.0);
  EXPECT_THROW(least_squares(a, Vector::Zero(3)), Error);
}

}  // namespace
}  // namespace subdiff
