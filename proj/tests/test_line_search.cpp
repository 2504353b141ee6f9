#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

namespace subdiff {
namespace {

ModelPtr square() {
  return smooth_model(1, [](const Point& x) { return x[0] * x[0]; }, [](const Point& x) { return Point{2.0 * x[0]}; },
                      2.0);
}

TEST(Armijo, OneBacktrackOnSquare) {
  const auto s = armijo(*square(), Point{1.0}, Point{-1.0}, -2.0, ArmijoParams{});
  EXPECT_DOUBLE_EQ(s.alpha, 0.5);
  EXPECT_EQ(s.backtracks, 1u);
  // alpha = 1 lands on the boundary: -1 < -1 is false.
  EXPECT_FALSE(square()->value(Point{0.0}).value() - 1.0 < 0.5 * 1.0 * -2.0);
  EXPECT_TRUE(0.25 - 1.0 < 0.5 * 0.5 * -2.0);
}

TEST(Armijo, LinearAcceptsFullStep) {
  const auto f = linear_model(Point{1.0, -2.0});
  const Point w{-1.0, 0.5};
  const double d = f->subderivative(Point::zeros(2), w).value();
  const auto s = armijo(*f, Point{3.0, 3.0}, w, d, ArmijoParams{});
  EXPECT_DOUBLE_EQ(s.alpha, 1.0);
  EXPECT_EQ(s.backtracks, 0u);
}

TEST(Armijo, HalfSquareBoundaryRejects) {
  const auto s = armijo(*half_squared_norm(1), Point{1.0}, Point{-1.0}, -1.0, ArmijoParams{});
  EXPECT_DOUBLE_EQ(s.alpha, 0.5);
  EXPECT_EQ(s.backtracks, 1u);
}

TEST(Armijo, RespectsAlphaInitAndMu) {
  ArmijoParams p;
  p.mu = 0.1;
  p.alpha_init = 4.0;
  const auto s = armijo(*square(), Point{1.0}, Point{-1.0}, -2.0, p);
  // 4: 9 - 1; 0.4: 0.36 - 1 = -0.64 < -0.4.
  EXPECT_DOUBLE_EQ(s.alpha, 0.4);
  EXPECT_EQ(s.backtracks, 1u);
}

TEST(Armijo, Errors) {
  EXPECT_THROW(armijo(*square(), Point{1.0}, Point{-1.0}, 0.0, ArmijoParams{}), Error);
  ArmijoParams bad;
  bad.mu = 1.0;
  EXPECT_THROW(armijo(*square(), Point{1.0}, Point{-1.0}, -2.0, bad), Error);
  // Claimed descent along an ascent direction never satisfies the test.
  ArmijoParams few;
  few.max_backtracks = 5;
  try {
    armijo(*square(), Point{1.0}, Point{1.0}, -2.0, few);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BacktrackExhausted);
  }
}

TEST(Armijo, RejectsInfiniteTrials) {
  const auto g = std::make_shared<LambdaModel>(
      1, "wall", [](const Point& x) { return x[0] < 1.0 ? ExtReal(-x[0]) : ExtReal::pos_inf(); },
      [](const Point&, const Point& w) { return ExtReal(-w[0]); });
  // From 0.5: trials 1.5 and 1.0 are outside the domain, 0.75 decreases enough.
  const auto t = armijo(*g, Point{0.5}, Point{1.0}, -1.0, ArmijoParams{});
  EXPECT_DOUBLE_EQ(t.alpha, 0.25);
  EXPECT_EQ(t.backtracks, 2u);
}

TEST(Armijo, StepLowerBoundFromDescentConstant) {
  Rng rng(13);
  const std::vector<ModelPtr> models{half_squared_distance(Point{1.0, -1.0}),
                                     sum({half_squared_norm(2), neg_l1_norm(2)}),
                                     moreau_envelope(*zero_norm(2), 0.5)};
  for (const auto& f : models) {
    const double lip = *f->descent_constant();
    for (int i = 0; i < 200; ++i) {
      const Point x = rng.uniform_box(2, -3.0, 3.0);
      const auto dir = search_direction(*f, x, NormChoice::L1, {});
      const double d = dir.value.value();
      if (!(d < -1e-9)) continue;
      ArmijoParams p;
      p.alpha_init = 8.0;
      const auto s = armijo(*f, x, dir.w, d, p);
      const double drop = f->value(x + s.alpha * dir.w).value() - f->value(x).value();
      EXPECT_LT(drop, 0.5 * s.alpha * d);
      if (s.backtracks >= 1) {
        EXPECT_GT(s.alpha, -p.mu * d / lip) << f->name() << " x=" << x;
      }
    }
  }
}

TEST(Schedule, Diminishing) {
  const Schedule s = Diminishing{1.0};
  const auto f = square();
  EXPECT_DOUBLE_EQ(schedule_step(s, 0, *f, Point{1.0}, Point{-1.0}, -2.0).alpha, 1.0);
  EXPECT_DOUBLE_EQ(schedule_step(s, 9, *f, Point{1.0}, Point{-1.0}, -2.0).alpha, 0.1);
  double harmonic = 0.0, basel = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double a = schedule_step(s, static_cast<std::size_t>(k), *f, Point{1.0}, Point{-1.0}, -2.0).alpha;
    harmonic += a;
    basel += a * a;
  }
  EXPECT_GT(harmonic, 12.0);
  EXPECT_LT(basel, 2.0);
}

TEST(Schedule, ArmijoDelegates) {
  const Schedule s = ArmijoParams{};
  const auto r = schedule_step(s, 7, *square(), Point{1.0}, Point{-1.0}, -2.0);
  EXPECT_DOUBLE_EQ(r.alpha, 0.5);
  EXPECT_EQ(r.backtracks, 1u);
  EXPECT_THROW(schedule_step(Schedule{Diminishing{0.0}}, 0, *square(), Point{1.0}, Point{-1.0}, -2.0), Error);
}

}  // namespace
}  // namespace subdiff
