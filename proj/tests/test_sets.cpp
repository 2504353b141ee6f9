#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

namespace subdiff {
namespace {

using testing::ext_near;

TEST(DistanceToSet, OutsideSingleton) {
  const auto f = distance_to_set(singleton_set(Point::zeros(2)));
  const Point x{3.0, 4.0}, w{1.0, 0.0};
  EXPECT_TRUE(ext_near(f->subderivative(x, w), 0.6, 1e-15));
  EXPECT_TRUE(ext_near(fd_subderivative(*f, x, w).estimate, 0.6, 1e-6));
}

TEST(DistanceToSet, AtSingletonIsNorm) {
  const auto f = distance_to_set(singleton_set(Point::zeros(2)));
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const Point w = rng.normal_vector(2);
    EXPECT_TRUE(ext_near(f->subderivative(Point::zeros(2), w), norm2(w), 1e-15));
  }
}

TEST(DistanceToSet, OutsideOrthant) {
  const auto f = distance_to_set(nonnegative_orthant(2));
  const Point x{1.0, -2.0}, w{0.0, 1.0};
  EXPECT_TRUE(ext_near(f->subderivative(x, w), -1.0, 0.0));
  EXPECT_TRUE(ext_near(fd_subderivative(*f, x, w).estimate, -1.0, 1e-6));
}

TEST(DistanceToSet, LipschitzAndBoundedByNorm) {
  const std::vector<SetPtr> sets{nonnegative_orthant(3), ball_set(Point{0.0, 1.0, 0.0}, 1.5),
                                 affine_set(Matrix::Ones(1, 3), Vector::Ones(1))};
  Rng rng(5);
  for (const auto& set : sets) {
    const auto f = distance_to_set(set);
    for (int i = 0; i < 100; ++i) {
      const Point x = rng.uniform_box(3, -2.0, 2.0), y = rng.uniform_box(3, -2.0, 2.0), w = rng.normal_vector(3);
      EXPECT_LE(std::abs(f->value(x).value() - f->value(y).value()), norm2(x - y) + 1e-12);
      EXPECT_LE(f->subderivative(x, w).value(), norm2(w) + 1e-12);
    }
  }
}

TEST(DistanceToSet, MultipleProjectionsTakeMin) {
  // Two points; x equidistant. d f(x)(w) = min over y of <x - y, w> / |x - y|.
  Polyhedron left{Matrix::Identity(1, 1), Vector::Constant(1, -1.0)};
  Polyhedron right{-Matrix::Identity(1, 1), Vector::Constant(1, -1.0)};
  const auto f = distance_to_set(polyhedral_union({left, right}));
  EXPECT_TRUE(ext_near(f->value(Point{0.0}), 1.0, 1e-15));
  EXPECT_TRUE(ext_near(f->subderivative(Point{0.0}, Point{1.0}), -1.0, 1e-15));
  EXPECT_TRUE(ext_near(f->subderivative(Point{0.0}, Point{-1.0}), -1.0, 1e-15));
  EXPECT_FALSE(f->gradient(Point{0.0}));
}

void check_projection_invariants(const SetModel& set, Rng& rng, int samples, double spread) {
  for (int i = 0; i < samples; ++i) {
    const Point x = rng.uniform_box(set.dimension(), -spread, spread);
    const auto proj = set.project(x);
    ASSERT_FALSE(proj.empty());
    const double d0 = norm2(x - proj.front());
    for (const auto& p : proj) {
      EXPECT_TRUE(set.contains(p)) << set.name() << " " << p;
      EXPECT_NEAR(norm2(x - p), d0, 1e-12);
    }
    // No sampled member is closer than the projection.
    for (int j = 0; j < 20; ++j) {
      const Point q = set.project(rng.uniform_box(set.dimension(), -spread, spread)).front();
      EXPECT_GE(norm2(x - q), d0 - 1e-9) << set.name();
    }
  }
}

TEST(SetModels, ProjectionInvariants) {
  Rng rng(17);
  Matrix g(3, 2);
  g << 1, 1, -1, 0, 0, -1;
  const std::vector<SetPtr> sets{
      box_set(Vector::Constant(2, -1.0), Vector::Constant(2, 0.5)),
      nonnegative_orthant(2),
      ball_set(Point{1.0, -1.0}, 0.7),
      affine_set(Matrix::Ones(1, 2), Vector::Constant(1, 1.0)),
      singleton_set(Point{0.5, 0.5}),
      polyhedron(g, Vector::Constant(3, 1.0)),
      polyhedral_union({Polyhedron{g, Vector::Constant(3, 1.0)}, Polyhedron{-g, Vector::Constant(3, 1.0)}}),
      complementarity_set(1),
  };
  for (const auto& s : sets) check_projection_invariants(*s, rng, 50, 3.0);
}

TEST(SetModels, PolyhedronProjectionMatchesClosedForm) {
  // Triangle x >= 0, y >= 0, x + y <= 1.
  Matrix g(3, 2);
  g << -1, 0, 0, -1, 1, 1;
  const Vector h(Vector::Map(std::array<double, 3>{0.0, 0.0, 1.0}.data(), 3));
  const auto set = polyhedron(g, h);
  EXPECT_EQ(set->project(Point{2.0, 2.0}).front(), (Point{0.5, 0.5}));
  const Point corner = set->project(Point{-1.0, -3.0}).front();
  EXPECT_NEAR(norm2(corner), 0.0, 1e-12);
  const Point edge = set->project(Point{0.5, -2.0}).front();
  EXPECT_NEAR(edge[0], 0.5, 1e-12);
  EXPECT_NEAR(edge[1], 0.0, 1e-12);
}

TEST(SetModels, TangentDistanceZeroOnFeasibleDirections) {
  Rng rng(23);
  const std::vector<SetPtr> sets{box_set(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)),
                                 nonnegative_orthant(2), ball_set(Point{0.0, 0.0}, 1.0),
                                 affine_set(Matrix::Ones(1, 2), Vector::Zero(1)), complementarity_set(1)};
  for (const auto& set : sets) {
    for (int i = 0; i < 200; ++i) {
      const Point x = set->project(rng.uniform_box(2, -2.0, 2.0)).front();
      const Point w = rng.normal_vector(2);
      bool feasible = true;
      for (double t : {1e-9, 1e-7, 1e-5}) feasible = feasible && set->contains(x + t * w);
      if (feasible) {
        EXPECT_NEAR(set->tangent_distance(x, w), 0.0, 1e-9) << set->name() << " x=" << x << " w=" << w;
      }
    }
  }
}

TEST(SetModels, TangentDistanceClosedForms) {
  const auto orthant = nonnegative_orthant(2);
  EXPECT_DOUBLE_EQ(orthant->tangent_distance(Point{0.0, 1.0}, Point{-3.0, 4.0}), 3.0);
  const auto ball = ball_set(Point::zeros(2), 1.0);
  EXPECT_DOUBLE_EQ(ball->tangent_distance(Point{1.0, 0.0}, Point{2.0, 5.0}), 2.0);
  EXPECT_DOUBLE_EQ(ball->tangent_distance(Point{0.0, 0.0}, Point{2.0, 5.0}), 0.0);
  const auto comp = complementarity_set(1);
  EXPECT_DOUBLE_EQ(comp->tangent_distance(Point{0.0, 0.0}, Point{1.0, 1.0}), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(comp->tangent_distance(Point{-1.0, 0.0}, Point{1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(comp->tangent_distance(Point{0.0, 0.0}, Point{-1.0, 0.0}), 0.0);
  try {
    (void)orthant->tangent_distance(Point{-1.0, 0.0}, Point{1.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotFeasible);
  }
}

TEST(SetModels, ComplementarityProjectionTies) {
  const auto comp = complementarity_set(2);
  // Layout (y1, y2, z1, z2); a pair (-1, -1) is equidistant from both rays.
  EXPECT_EQ(comp->project(Point{-1.0, -1.0, -1.0, 5.0}).size(), 2u);
  EXPECT_EQ(comp->project(Point{-1.0, -1.0, -1.0, -1.0}).size(), 4u);
  EXPECT_EQ(comp->project(Point{1.0, 0.0, 1.0, 0.0}).size(), 1u);
  EXPECT_TRUE(comp->contains(Point{-1.0, 0.0, 0.0, -2.0}));
  EXPECT_FALSE(comp->contains(Point{-1.0, 0.0, -1.0, 0.0}));
}

TEST(SetModels, SmallDistancesAreNotTies) {
  // Pair (t, -2t): the second ray is nearer at every scale.
  const auto comp = complementarity_set(1);
  const auto dist = distance_to_set(comp);
  for (double t : {1e-2, 1e-5, 1e-8}) {
    const auto p = comp->project(Point{t, -2.0 * t});
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p.front(), (Point{0.0, -2.0 * t}));
    EXPECT_NEAR(dist->value(Point{t, -2.0 * t}).value() / t, 1.0, 1e-12);
  }
}

TEST(SetModels, Errors) {
  EXPECT_THROW(box_set(Vector::Constant(2, 1.0), Vector::Constant(2, 0.0)), Error);
  EXPECT_THROW(ball_set(Point::zeros(2), -1.0), Error);
  EXPECT_THROW(polyhedral_union({}), Error);
}

}  // namespace
}  // namespace subdiff
