#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

namespace subdiff {
namespace {

using testing::ext_near;
using testing::grid_min;

ModelPtr dc_model(std::size_t n) { return sum({half_squared_norm(n), neg_l1_norm(n)}); }

TEST(L2Smooth, NormalizedNegativeGradient) {
  const auto f = half_squared_norm(2);
  const auto r = solve_l2_smooth(*f, Point{3.0, 4.0});
  EXPECT_NEAR(r.w[0], -0.6, 1e-15);
  EXPECT_NEAR(r.w[1], -0.8, 1e-15);
  EXPECT_TRUE(ext_near(r.value, -5.0, 1e-14));
  EXPECT_TRUE(r.exact);
  const auto brute = brute_force_direction(*f, Point{3.0, 4.0}, NormChoice::L2, 1e-4);
  EXPECT_GE(brute.value.value(), r.value.value() - 1e-12);
  EXPECT_NEAR(brute.value.value(), -5.0, 1e-6);
}

TEST(L2Smooth, StationaryAndLinear) {
  const auto r = solve_l2_smooth(*half_squared_norm(2), Point::zeros(2));
  EXPECT_TRUE(r.w.is_zero());
  EXPECT_TRUE(ext_near(r.value, 0.0, 0.0));
  const auto lin = linear_model(Point{1.0, 0.0});
  const auto s = solve_l2_smooth(*lin, Point{7.0, -2.0});
  EXPECT_EQ(s.w, (Point{-1.0, 0.0}));
  EXPECT_TRUE(ext_near(s.value, -1.0, 0.0));
  EXPECT_NEAR(brute_force_direction(*lin, Point{7.0, -2.0}, NormChoice::L2, 1e-4).value.value(), -1.0, 1e-6);
}

TEST(L2Smooth, NoGradient) {
  try {
    solve_l2_smooth(*l1_norm(2), Point::zeros(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoGradient);
  }
}

TEST(LInfSeparable, MixedIndexSets) {
  const auto f = sum({linear_model(Point{2.0, -0.5}), l1_norm(2)});
  const auto r = solve_linf_separable(*f, Point::zeros(2));
  EXPECT_EQ(r.w, (Point{-1.0, 0.0}));
  EXPECT_TRUE(ext_near(r.value, -1.0, 0.0));
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(grid_min([](double t) { return 2.0 * t + std::abs(t); }, -1.0, 1.0).second, -1.0, 1e-12);
  EXPECT_NEAR(grid_min([](double t) { return -0.5 * t + std::abs(t); }, -1.0, 1.0).second, 0.0, 1e-12);
}

TEST(LInfSeparable, StationaryAtKink) {
  const auto f = sum({linear_model(Point::zeros(3)), l1_norm(3, 0.7)});
  const auto r = solve_linf_separable(*f, Point::zeros(3));
  EXPECT_TRUE(r.w.is_zero());
  EXPECT_TRUE(ext_near(r.value, 0.0, 0.0));
}

TEST(LInfSeparable, PositiveCoordinate) {
  // d f(1)(w) = 2 w + w = 3 w on [-1, 1]: the minimum is -3 at w = -1.
  const auto f = sum({linear_model(Point{2.0}), l1_norm(1)});
  const auto r = solve_linf_separable(*f, Point{1.0});
  EXPECT_EQ(index_set_of(1.0, 2.0, 1.0), 1);
  EXPECT_EQ(r.w, (Point{-1.0}));
  EXPECT_TRUE(ext_near(r.value, -3.0, 0.0));
  EXPECT_NEAR(grid_min([](double t) { return 2.0 * t + t; }, -1.0, 1.0).second, -3.0, 1e-12);
}

TEST(LInfSeparable, NotSeparable) {
  try {
    solve_linf_separable(*zero_norm(2), Point{1.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotSeparable);
  }
}

TEST(LInfSeparable, MatchesIndexTable) {
  Rng rng(41);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 6));
    const double lambda = rng.uniform(0.1, 2.0);
    Vector xs(static_cast<Eigen::Index>(n)), cs(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto idx = static_cast<Eigen::Index>(i);
      xs[idx] = rng.uniform() < 0.4 ? 0.0 : rng.uniform(-2.0, 2.0);
      cs[idx] = rng.uniform(-3.0, 3.0);
      if (rng.uniform() < 0.15) cs[idx] = rng.uniform() < 0.5 ? lambda : -lambda;
    }
    const Point x(xs), c(cs);
    const auto f = sum({linear_model(c), l1_norm(n, lambda)});
    const auto r = solve_linf_separable(*f, x);
    EXPECT_EQ(r.w, index_set_direction(c, x, lambda)) << "x=" << x << " c=" << c << " lambda=" << lambda;
    EXPECT_EQ(r.value, f->subderivative(x, r.w));
  }
}

TEST(LInfSeparable, GeneralScalarPartsRefine) {
  SeparableForm form{Point{1.0}, {ScalarPart::custom([](double t) { return t * t; })}};
  const auto r = solve_linf_separable(form);
  EXPECT_FALSE(r.exact);
  EXPECT_NEAR(r.w[0], -0.5, 1e-8);
  EXPECT_NEAR(r.value.value(), -0.25, 1e-12);
}

TEST(L1Extreme, TieBreakAtOrigin) {
  const auto f = dc_model(2);
  const auto r = solve_l1_extreme(*f, Point::zeros(2));
  EXPECT_EQ(r.w, Point::unit(2, 0));
  EXPECT_TRUE(ext_near(r.value, -1.0, 0.0));
  EXPECT_TRUE(r.exact);
  EXPECT_TRUE(ext_near(fd_subderivative(*f, Point::zeros(2), r.w).estimate, -1.0, 1e-6));
}

TEST(L1Extreme, OffAxis) {
  const auto f = dc_model(2);
  const Point x{2.0, 0.0};
  const auto r = solve_l1_extreme(*f, x);
  EXPECT_EQ(r.w, Point::unit(2, 0, -1.0));
  EXPECT_TRUE(ext_near(r.value, -1.0, 0.0));
  const auto brute = brute_force_direction(*f, x, NormChoice::L1, 1e-3);
  EXPECT_NEAR(brute.value.value(), -1.0, 1e-9);
}

TEST(L1Extreme, OneDimensional) {
  const auto f = neg_l1_norm(1);
  const auto r = solve_l1_extreme(*f, Point{0.0});
  EXPECT_EQ(r.w, (Point{1.0}));
  EXPECT_TRUE(ext_near(r.value, -1.0, 0.0));
}

TEST(L1Extreme, ReducedVertexSet) {
  const auto v = l1_vertices(3, true);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v.back(), (Point{-1.0, -1.0, -1.0}));
  const auto r = solve_l1_extreme(*dc_model(3), Point{1.0, 1.0, 1.0}, true);
  EXPECT_EQ(r.norm, NormChoice::SimplexGauge);
  EXPECT_LE(norm_value(r.w, NormChoice::SimplexGauge), 1.0 + 1e-12);
  // The gradient x - sign(x) vanishes at (1, 1, 1), so every vertex gives 0.
  EXPECT_TRUE(ext_near(r.value, 0.0, 0.0));
}

TEST(L1Extreme, MatchesBruteForce) {
  Rng rng(43);
  for (int k = 0; k < 30; ++k) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 3));
    const Point c = rng.normal_vector(n);
    const auto f = sum({linear_model(c), neg_l1_norm(n, rng.uniform(0.2, 1.5))});
    Vector xs = rng.uniform_box(n, -1.0, 1.0).vec();
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
      if (rng.uniform() < 0.5) xs[i] = 0.0;
    }
    const Point x(xs);
    const auto exact = solve_l1_extreme(*f, x);
    const auto brute = brute_force_direction(*f, x, NormChoice::L1, 0.02);
    EXPECT_NEAR(exact.value.value(), brute.value.value(), 1e-6);
  }
}

TEST(Fallback, CoordinateOnlyAtL1Kink) {
  const auto r = solve_sampling_fallback(*l1_norm(3), Point::zeros(3), NormChoice::L2, 0, 1);
  EXPECT_TRUE(ext_near(r.value, 1.0, 0.0));
  EXPECT_FALSE(r.exact);
  EXPECT_EQ(r.evaluations, 6u);
}

TEST(Fallback, NoWorseThanCoordinatesAndDeterministic) {
  const auto f = half_squared_distance(Point{1.0, -2.0, 0.5});
  const Point x{0.0, 0.0, 0.0};
  const auto a = solve_sampling_fallback(*f, x, NormChoice::L2, 50, 9);
  const auto b = solve_sampling_fallback(*f, x, NormChoice::L2, 50, 9);
  EXPECT_EQ(a.w, b.w);
  EXPECT_EQ(a.value, b.value);
  for (std::size_t i = 0; i < 3; ++i) {
    for (double s : {1.0, -1.0}) EXPECT_LE(a.value, f->subderivative(x, Point::unit(3, i, s)));
  }
  const auto exact = solve_l2_smooth(*f, x);
  EXPECT_LE(exact.value.value(), a.value.value() + 1e-12);
}

TEST(Fallback, SkipsInfiniteDirections) {
  const auto f = zero_norm(2);
  const auto r = solve_sampling_fallback(*f, Point{1.0, 0.0}, NormChoice::L2, 16, 3);
  EXPECT_TRUE(r.value.is_finite());
  const auto all_inf = solve_sampling_fallback(*f, Point{0.0, 0.0}, NormChoice::L2, 16, 3);
  EXPECT_TRUE(all_inf.w.is_zero());
  EXPECT_TRUE(ext_near(all_inf.value, 0.0, 0.0));
}

TEST(Norms, SampledPointsLieOnSphere) {
  Rng rng(2);
  for (NormChoice norm : {NormChoice::L2, NormChoice::L1, NormChoice::LInf, NormChoice::SimplexGauge}) {
    for (int i = 0; i < 100; ++i) EXPECT_NEAR(norm_value(sample_unit_sphere(rng, 4, norm), norm), 1.0, 1e-12);
    EXPECT_EQ(parse_norm(to_string(norm)), norm);
  }
  EXPECT_FALSE(parse_norm("l3"));
}

TEST(Strategy, AutoIsNormDriven) {
  using K = DirectionStrategy::Kind;
  const auto smooth = half_squared_norm(2);
  EXPECT_EQ(resolve_strategy(*smooth, Point{1.0, 1.0}, NormChoice::L2), K::L2Smooth);
  EXPECT_EQ(resolve_strategy(*dc_model(2), Point{1.0, 0.0}, NormChoice::L1), K::L1Extreme);
  EXPECT_EQ(resolve_strategy(*sum({half_squared_norm(2), l1_norm(2)}), Point{1.0, 0.0}, NormChoice::LInf),
            K::LInfSeparable);
  EXPECT_EQ(resolve_strategy(*zero_norm(2), Point{1.0, 0.0}, NormChoice::L2), K::Fallback);
  for (K k : {K::Auto, K::L2Smooth, K::LInfSeparable, K::L1Extreme, K::Fallback}) {
    EXPECT_EQ(parse_strategy(to_string(k)), k);
  }
}

TEST(Strategy, ValueMatchesRecomputation) {
  Rng rng(4);
  const std::vector<std::pair<ModelPtr, NormChoice>> cases{
      {half_squared_distance(Point{1.0, 2.0}), NormChoice::L2},
      {sum({half_squared_norm(2), l1_norm(2, 0.5)}), NormChoice::LInf},
      {dc_model(2), NormChoice::L1},
      {sum({half_squared_norm(2), l1_norm(2)}), NormChoice::L2},
  };
  for (const auto& [f, norm] : cases) {
    for (int i = 0; i < 20; ++i) {
      const Point x = rng.uniform_box(2, -2.0, 2.0);
      const auto r = search_direction(*f, x, norm, {});
      EXPECT_EQ(r.value, f->subderivative(x, r.w));
      EXPECT_LE(norm_value(r.w, r.norm), 1.0 + 1e-12);
    }
  }
}

}  // namespace
}  // namespace subdiff
