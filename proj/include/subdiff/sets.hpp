#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subdiff/calculus.hpp"
#include "subdiff/error.hpp"
#include "subdiff/maps.hpp"
#include "subdiff/model.hpp"
#include "subdiff/point.hpp"

namespace subdiff {

/// A closed set with Euclidean projection and tangent-cone distance.
class SetModel {
 public:
  virtual ~SetModel() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::string name() const = 0;
  virtual bool contains(const Point& x) const = 0;

  /// Every nearest point of the set to x. Empty only for an empty set.
  virtual std::vector<Point> project(const Point& x) const = 0;

  /// dist(w; T(x)) for x in the set; NotFeasible otherwise.
  virtual double tangent_distance(const Point& x, const Point& w) const = 0;

  /// Every tangent vector is realized by a curve inside the set.
  virtual bool geometrically_derivable() const { return true; }
};

using SetPtr = std::shared_ptr<const SetModel>;

namespace detail {

inline void require_member(const SetModel& set, const Point& x) {
  if (!set.contains(x)) throw Error(Errc::NotFeasible, "point is not in " + set.name());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Box [l, u], bounds may be infinite.

class BoxSet final : public SetModel {
 public:
  BoxSet(Vector lower, Vector upper, std::string name = "box")
      : lower_(std::move(lower)), upper_(std::move(upper)), name_(std::move(name)) {
    require(lower_.size() == upper_.size() && lower_.size() > 0, Errc::DimensionMismatch, "box: bound sizes differ");
    for (Eigen::Index i = 0; i < lower_.size(); ++i) {
      require(!std::isnan(lower_[i]) && !std::isnan(upper_[i]) && lower_[i] <= upper_[i], Errc::InvalidArgument,
              "box: need lower <= upper");
    }
  }

  std::size_t dimension() const override { return static_cast<std::size_t>(lower_.size()); }
  std::string name() const override { return name_; }

  bool contains(const Point& x) const override {
    require_dim(x, dimension(), "box");
    return (x.vec().array() >= lower_.array()).all() && (x.vec().array() <= upper_.array()).all();
  }

  std::vector<Point> project(const Point& x) const override {
    require_dim(x, dimension(), "box");
    return {Point(Vector(x.vec().cwiseMax(lower_).cwiseMin(upper_)))};
  }

  double tangent_distance(const Point& x, const Point& w) const override {
    detail::require_member(*this, x);
    require_dim(w, dimension(), "box direction");
    double sq = 0.0;
    for (std::size_t i = 0; i < dimension(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const bool at_lower = x[i] == lower_[k], at_upper = x[i] == upper_[k];
      double v = 0.0;
      if (at_lower && at_upper) v = w[i];
      else if (at_lower) v = std::min(w[i], 0.0);
      else if (at_upper) v = std::max(w[i], 0.0);
      sq += v * v;
    }
    return std::sqrt(sq);
  }

 private:
  Vector lower_, upper_;
  std::string name_;
};

inline SetPtr box_set(Vector lower, Vector upper) {
  return std::make_shared<BoxSet>(std::move(lower), std::move(upper));
}

inline SetPtr nonnegative_orthant(std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(n);
  return std::make_shared<BoxSet>(Vector::Zero(dim), Vector::Constant(dim, std::numeric_limits<double>::infinity()),
                                  "orthant");
}

// ---------------------------------------------------------------------------
// Closed Euclidean ball.

class BallSet final : public SetModel {
 public:
  BallSet(Point center, double radius) : center_(std::move(center)), radius_(radius) {
    require(radius_ >= 0.0 && std::isfinite(radius_), Errc::InvalidArgument, "ball radius must be >= 0");
  }

  std::size_t dimension() const override { return center_.size(); }
  std::string name() const override { return "ball"; }

  bool contains(const Point& x) const override {
    return norm2(x - center_) <= radius_ * (1.0 + kRelTol) + kAbsTol;
  }

  std::vector<Point> project(const Point& x) const override {
    const Point offset = x - center_;
    const double r = norm2(offset);
    if (r <= radius_) return {x};
    return {center_ + (radius_ / r) * offset};
  }

  double tangent_distance(const Point& x, const Point& w) const override {
    detail::require_member(*this, x);
    const Point offset = x - center_;
    const double r = norm2(offset);
    if (r < radius_ * (1.0 - kRelTol) - kAbsTol) return 0.0;
    if (r == 0.0) return norm2(w);  // radius 0: the tangent cone is {0}
    return std::max(0.0, dot(offset, w) / r);
  }

 private:
  static constexpr double kRelTol = 1e-12;
  static constexpr double kAbsTol = 1e-14;
  Point center_;
  double radius_;
};

inline SetPtr ball_set(Point center, double radius) { return std::make_shared<BallSet>(std::move(center), radius); }

// ---------------------------------------------------------------------------
// Affine subspace {x : A x = b}, A of full row rank.

class AffineSet final : public SetModel {
 public:
  AffineSet(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
    require(a_.rows() == b_.size() && a_.rows() > 0 && a_.cols() > 0, Errc::DimensionMismatch,
            "affine set: rows(A) != size(b)");
    gram_ = Matrix(a_ * a_.transpose()).llt();
    require(gram_.info() == Eigen::Success, Errc::InvalidArgument, "affine set: A must have full row rank");
  }

  std::size_t dimension() const override { return static_cast<std::size_t>(a_.cols()); }
  std::string name() const override { return "affine"; }

  bool contains(const Point& x) const override {
    require_dim(x, dimension(), "affine set");
    return (a_ * x.vec() - b_).norm() <= 1e-10 * (1.0 + b_.norm() + a_.norm() * x.vec().norm());
  }

  std::vector<Point> project(const Point& x) const override {
    require_dim(x, dimension(), "affine set");
    return {Point(Vector(x.vec() - a_.transpose() * gram_.solve(Vector(a_ * x.vec() - b_))))};
  }

  // T(x) is the null space of A; the distance is the row-space component of w.
  double tangent_distance(const Point& x, const Point& w) const override {
    detail::require_member(*this, x);
    require_dim(w, dimension(), "affine set direction");
    return (a_.transpose() * gram_.solve(Vector(a_ * w.vec()))).norm();
  }

 private:
  Matrix a_;
  Vector b_;
  Eigen::LLT<Matrix> gram_;
};

inline SetPtr affine_set(Matrix a, Vector b) { return std::make_shared<AffineSet>(std::move(a), std::move(b)); }

// ---------------------------------------------------------------------------
// Singleton {p}.

class SingletonSet final : public SetModel {
 public:
  explicit SingletonSet(Point p) : p_(std::move(p)) {}
  std::size_t dimension() const override { return p_.size(); }
  std::string name() const override { return "singleton"; }
  bool contains(const Point& x) const override { return x == p_; }
  std::vector<Point> project(const Point& x) const override {
    require_dim(x, dimension(), "singleton");
    return {p_};
  }
  double tangent_distance(const Point& x, const Point& w) const override {
    detail::require_member(*this, x);
    return norm2(w);
  }

 private:
  Point p_;
};

inline SetPtr singleton_set(Point p) { return std::make_shared<SingletonSet>(std::move(p)); }

// ---------------------------------------------------------------------------
// Finite unions of convex polyhedra {x : G x <= h}.

/// Euclidean projection onto {y : G y <= h} by enumerating candidate active
/// sets of facets. Meant for small fixtures: up to 20 facets.
struct Polyhedron {
  Matrix g;
  Vector h;

  static constexpr double kFeasTol = 1e-10;
  static constexpr double kRoundTol = 1e-13;
  static constexpr Eigen::Index kMaxFacets = 20;

  std::size_t dimension() const { return static_cast<std::size_t>(g.cols()); }

  bool contains(const Vector& x) const {
    return ((g * x - h).array() <= kFeasTol * (1.0 + h.cwiseAbs().array())).all();
  }

  std::optional<Vector> project(const Vector& x) const { return project_onto(g, h, x); }

  /// Projection of w onto the tangent cone {v : G_A v <= 0} at a member x.
  Vector project_tangent(const Vector& x, const Vector& w) const {
    std::vector<Eigen::Index> active;
    const Vector slack = g * x - h;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      if (slack[i] >= -kFeasTol * (1.0 + std::abs(h[i]))) active.push_back(i);
    }
    if (active.empty()) return w;
    Matrix ga(static_cast<Eigen::Index>(active.size()), g.cols());
    for (std::size_t k = 0; k < active.size(); ++k) ga.row(static_cast<Eigen::Index>(k)) = g.row(active[k]);
    auto p = project_onto(ga, Vector::Zero(ga.rows()), w);
    return p ? *p : Vector::Zero(w.size());  // a cone always contains 0
  }

  static std::optional<Vector> project_onto(const Matrix& g, const Vector& h, const Vector& x) {
    // Candidates are checked at rounding level: near the set the violations
    // that separate candidates are themselves tiny.
    const auto feasible = [&](const Vector& y) {
      return ((g * y - h).array() <= kRoundTol * (1.0 + h.cwiseAbs().array() + y.cwiseAbs().sum())).all();
    };
    // Exact test here: a tolerance would report distance 0 just outside the set.
    if (((g * x - h).array() <= 0.0).all()) return x;
    const Eigen::Index m = g.rows();
    if (m > kMaxFacets) throw Error(Errc::InvalidArgument, "polyhedron: too many facets for enumeration");
    const Eigen::Index max_active = std::min<Eigen::Index>(m, g.cols());
    std::optional<Vector> best;
    double best_dist = std::numeric_limits<double>::infinity();
    // Subsets in order of increasing size; a KKT point (y feasible, multipliers >= 0)
    // is the unique projection.
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
      const auto size = static_cast<Eigen::Index>(std::popcount(mask));
      if (size > max_active) continue;
      Matrix gs(size, g.cols());
      Vector hs(size);
      Eigen::Index k = 0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (mask & (1u << i)) {
          gs.row(k) = g.row(i);
          hs[k++] = h[i];
        }
      }
      const Matrix gram = gs * gs.transpose();
      Eigen::FullPivLU<Matrix> lu(gram);
      if (lu.rank() < size) continue;
      const Vector mult = lu.solve(Vector(gs * x - hs));
      if ((mult.array() < -kRoundTol).any()) continue;
      const Vector y = x - gs.transpose() * mult;
      if (!feasible(y)) continue;
      const double d = (y - x).norm();
      if (d < best_dist) {
        best_dist = d;
        best = y;
      }
    }
    return best;
  }
};

class PolyhedralUnion final : public SetModel {
 public:
  explicit PolyhedralUnion(std::vector<Polyhedron> pieces) : pieces_(std::move(pieces)) {
    require(!pieces_.empty(), Errc::EmptyList, "polyhedral union: no pieces");
    for (const auto& p : pieces_) {
      require(p.g.rows() == p.h.size() && p.g.cols() > 0, Errc::DimensionMismatch, "polyhedron: rows(G) != size(h)");
      require(p.dimension() == pieces_.front().dimension(), Errc::DimensionMismatch,
              "polyhedral union: pieces differ in dimension");
    }
  }

  std::size_t dimension() const override { return pieces_.front().dimension(); }
  std::string name() const override { return "polyhedral_union"; }

  bool contains(const Point& x) const override {
    require_dim(x, dimension(), "polyhedral union");
    return std::any_of(pieces_.begin(), pieces_.end(), [&](const Polyhedron& p) { return p.contains(x.vec()); });
  }

  // Nearest points of every piece, filtered to the global minimizers.
  std::vector<Point> project(const Point& x) const override {
    require_dim(x, dimension(), "polyhedral union");
    std::vector<std::pair<double, Vector>> candidates;
    for (const auto& piece : pieces_) {
      if (auto y = piece.project(x.vec())) candidates.emplace_back((*y - x.vec()).norm(), std::move(*y));
    }
    std::vector<Point> out;
    if (candidates.empty()) return out;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) best = std::min(best, c.first);
    // Relative tolerance: near the set every distance is tiny and an absolute one merges them all.
    for (auto& c : candidates) {
      if (c.first > best * (1.0 + kTieTolerance)) continue;
      const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Point& p) {
        return (p.vec() - c.second).norm() <= kTieTolerance;
      });
      if (!duplicate) out.emplace_back(std::move(c.second));
    }
    return out;
  }

  // The tangent cone of a finite union is the union of the member cones.
  double tangent_distance(const Point& x, const Point& w) const override {
    detail::require_member(*this, x);
    require_dim(w, dimension(), "polyhedral union direction");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& piece : pieces_) {
      if (!piece.contains(x.vec())) continue;
      best = std::min(best, (w.vec() - piece.project_tangent(x.vec(), w.vec())).norm());
    }
    return best;
  }

  static constexpr double kTieTolerance = 1e-12;

 private:
  std::vector<Polyhedron> pieces_;
};

inline SetPtr polyhedral_union(std::vector<Polyhedron> pieces) {
  return std::make_shared<PolyhedralUnion>(std::move(pieces));
}

inline SetPtr polyhedron(Matrix g, Vector h) {
  return polyhedral_union({Polyhedron{std::move(g), std::move(h)}});
}

// ---------------------------------------------------------------------------
// Complementarity set {(y, z) in R^{2k} : <y, z> = 0, y <= 0, z <= 0}. Since
// every product y_i z_i is >= 0 this is the product over i of the two rays
// {y_i <= 0, z_i = 0} and {y_i = 0, z_i <= 0}.

class ComplementaritySet final : public SetModel {
 public:
  explicit ComplementaritySet(std::size_t pairs) : k_(pairs) {
    require(k_ > 0, Errc::InvalidArgument, "complementarity set needs at least one pair");
  }

  std::size_t dimension() const override { return 2 * k_; }
  std::string name() const override { return "complementarity"; }

  // Coordinates within kSnap of zero count as zero, so iterates that creep up
  // to a ray are treated as on it rather than a vanishing distance away.
  bool contains(const Point& x) const override {
    require_dim(x, dimension(), "complementarity set");
    for (std::size_t i = 0; i < k_; ++i) {
      const double a = snap(x[i]), b = snap(x[k_ + i]);
      if (a > 0.0 || b > 0.0 || (a != 0.0 && b != 0.0)) return false;
    }
    return true;
  }

  std::vector<Point> project(const Point& x) const override {
    require_dim(x, dimension(), "complementarity set");
    // Per pair: the nearest ray points (two when equidistant).
    std::vector<std::vector<std::pair<double, double>>> options(k_);
    for (std::size_t i = 0; i < k_; ++i) {
      const double a = x[i], b = x[k_ + i];
      const double d1 = std::max(a, 0.0) * std::max(a, 0.0) + b * b;  // onto {a <= 0, b = 0}
      const double d2 = a * a + std::max(b, 0.0) * std::max(b, 0.0);  // onto {a = 0, b <= 0}
      const std::pair<double, double> p1{std::min(a, 0.0), 0.0}, p2{0.0, std::min(b, 0.0)};
      // Relative, as for the polyhedral union.
      if (std::abs(d1 - d2) <= kTieTolerance * std::max(d1, d2) && p1 != p2) options[i] = {p1, p2};
      else options[i] = {d1 <= d2 ? p1 : p2};
    }
    std::size_t combos = 1;
    for (const auto& o : options) {
      combos *= o.size();
      require(combos <= (1u << 16), Errc::InvalidArgument, "complementarity projection: too many ties");
    }
    std::vector<Point> out;
    out.reserve(combos);
    for (std::size_t c = 0; c < combos; ++c) {
      Vector y(static_cast<Eigen::Index>(2 * k_));
      std::size_t rest = c;
      for (std::size_t i = 0; i < k_; ++i) {
        const auto& choice = options[i][rest % options[i].size()];
        rest /= options[i].size();
        y[static_cast<Eigen::Index>(i)] = choice.first;
        y[static_cast<Eigen::Index>(k_ + i)] = choice.second;
      }
      out.emplace_back(std::move(y));
    }
    return out;
  }

  double tangent_distance(const Point& x, const Point& w) const override {
    detail::require_member(*this, x);
    require_dim(w, dimension(), "complementarity direction");
    double sq = 0.0;
    for (std::size_t i = 0; i < k_; ++i) {
      const double a = snap(x[i]), b = snap(x[k_ + i]), u = w[i], v = w[k_ + i];
      if (a < 0.0) sq += v * v;
      else if (b < 0.0) sq += u * u;
      else sq += std::min(std::max(u, 0.0) * std::max(u, 0.0) + v * v, u * u + std::max(v, 0.0) * std::max(v, 0.0));
    }
    return std::sqrt(sq);
  }

  static constexpr double kTieTolerance = 1e-12;
  static constexpr double kSnap = 1e-10;

 private:
  static double snap(double v) { return std::abs(v) <= kSnap ? 0.0 : v; }

  std::size_t k_;
};

inline SetPtr complementarity_set(std::size_t pairs) { return std::make_shared<ComplementaritySet>(pairs); }

// ---------------------------------------------------------------------------
// dist(.; X) as a FunctionModel.

class DistanceModel final : public FunctionModel {
 public:
  explicit DistanceModel(SetPtr set) : set_(std::move(set)) {
    require(static_cast<bool>(set_), Errc::InvalidArgument, "null set");
  }

  std::size_t dimension() const override { return set_->dimension(); }
  std::string name() const override { return "dist(" + set_->name() + ")"; }

  // No membership shortcut: contains() has a tolerance and the value must not.
  ExtReal value(const Point& x) const override {
    return norm2(x - nearest(x).front());
  }

  // Inside: dist(w; T(x)). Outside: min over projections y of <x - y, w> / dist(x).
  ExtReal subderivative(const Point& x, const Point& w) const override {
    require_dim(w, dimension(), "distance direction");
    if (set_->contains(x)) return set_->tangent_distance(x, w);
    const auto proj = nearest(x);
    const double d = norm2(x - proj.front());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : proj) best = std::min(best, dot(x - y, w) / d);
    return best;
  }

  std::optional<Point> gradient(const Point& x) const override {
    if (set_->contains(x)) return std::nullopt;
    const auto proj = nearest(x);
    if (proj.size() != 1) return std::nullopt;
    const Point diff = x - proj.front();
    return (1.0 / norm2(diff)) * diff;
  }

  bool semi_differentiable() const override { return set_->geometrically_derivable(); }
  bool directionally_lower_regular() const override { return set_->geometrically_derivable(); }
  std::optional<double> lower_bound() const override { return 0.0; }

 private:
  std::vector<Point> nearest(const Point& x) const {
    auto proj = set_->project(x);
    if (proj.empty()) throw Error(Errc::EmptyProjection, set_->name() + " returned no nearest point");
    return proj;
  }

  SetPtr set_;
};

inline ModelPtr distance_to_set(SetPtr set) { return std::make_shared<DistanceModel>(std::move(set)); }

/// Exact penalty phi(x) + rho dist(G(x); X).
inline ModelPtr penalize(ModelPtr phi, SemiDiffMapPtr g, SetPtr set, double rho) {
  require(phi && g && set, Errc::InvalidArgument, "penalize: null argument");
  if (!(rho > 0.0)) throw Error(Errc::NonpositiveScale, "penalty weight must be positive");
  if (g->dimension_out() != set->dimension() || g->dimension_in() != phi->dimension()) {
    throw Error(Errc::DimensionMismatch, "penalize: phi, G and X do not chain");
  }
  ModelPtr dist = distance_to_set(std::move(set));
  ModelPtr composite;
  if (auto smooth = std::dynamic_pointer_cast<const SmoothMap>(g)) {
    composite = precompose_smooth(std::move(dist), std::move(smooth));
  } else {
    composite = precompose_semidiff(std::move(dist), std::move(g));
  }
  return sum({std::move(phi), scale(std::move(composite), rho)});
}

}  // namespace subdiff
