#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subdiff/calculus.hpp"
#include "subdiff/direction.hpp"
#include "subdiff/error.hpp"
#include "subdiff/io.hpp"
#include "subdiff/moreau.hpp"
#include "subdiff/network.hpp"
#include "subdiff/oracles.hpp"
#include "subdiff/point.hpp"
#include "subdiff/rng.hpp"
#include "subdiff/sets.hpp"

namespace subdiff::bench {

/// Constructor parameters shared by all problems; each problem reads the ones
/// it understands.
struct ProblemParams {
  std::optional<std::size_t> dim;
  double lambda = 1.0;
  std::optional<double> rho;
  double r = 0.5;
  std::string matrix_path;
  std::string rhs_path;
  std::optional<Vector> x0;
  std::uint64_t seed = 0;
};

struct Problem {
  ModelPtr f;
  Point x0;
  std::optional<double> lipschitz;  // descent constant wired into the rate audit
  std::optional<double> f_star;     // a lower bound on inf f
  NormChoice norm = NormChoice::L2;
  DirectionStrategy::Kind strategy = DirectionStrategy::Kind::Auto;
  double epsilon = 1e-3;
  std::size_t max_iter = 1000;
};

struct ProblemSpec {
  std::string name;
  std::string summary;
  std::vector<std::string> tags;
  std::function<Problem(const ProblemParams&)> build;
};

namespace detail {

inline Point pick_x0(const ProblemParams& p, std::size_t n, Vector fallback) {
  if (p.x0) {
    if (static_cast<std::size_t>(p.x0->size()) != n) {
      throw Error(Errc::DimensionMismatch, "x0 has " + std::to_string(p.x0->size()) + " entries, expected " +
                                               std::to_string(n));
    }
    return Point(*p.x0);
  }
  return Point(std::move(fallback));
}

inline std::size_t pick_dim(const ProblemParams& p, std::size_t def) {
  const std::size_t n = p.dim.value_or(def);
  require(n >= 1 && n <= 100000, Errc::InvalidArgument, "dimension must lie in [1, 100000]");
  return n;
}

inline Matrix random_matrix(Rng& rng, std::size_t m, std::size_t n) {
  Matrix a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = rng.normal() / std::sqrt(static_cast<double>(m));
  }
  return a;
}

// A and y from files when given, otherwise a seeded instance whose right-hand
// side comes from a 2-sparse ground truth.
inline std::pair<Matrix, Vector> linear_data(const ProblemParams& p, std::size_t default_n, double rows_per_col) {
  if (!p.matrix_path.empty() || !p.rhs_path.empty()) {
    require(!p.matrix_path.empty() && !p.rhs_path.empty(), Errc::InvalidArgument,
            "--matrix and --rhs must be given together");
    Matrix a = read_matrix_file(p.matrix_path);
    Vector y = read_vector_file(p.rhs_path);
    require(a.rows() == y.size(), Errc::DimensionMismatch, "rows(A) != size(y)");
    return {std::move(a), std::move(y)};
  }
  const std::size_t n = pick_dim(p, default_n);
  const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(rows_per_col * static_cast<double>(n) + 0.5));
  Rng rng(p.seed);
  Matrix a = random_matrix(rng, m, n);
  Vector truth = Vector::Zero(static_cast<Eigen::Index>(n));
  truth[0] = 1.0;
  if (n > 1) truth[static_cast<Eigen::Index>(n - 1)] = -2.0;
  Vector y = a * truth;
  return {std::move(a), std::move(y)};
}

inline double lambda_max(const Matrix& a) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(a.transpose() * a, Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues().maxCoeff());
}

inline Problem dc_quadratic_l1(const ProblemParams& p) {
  const std::size_t n = pick_dim(p, 2);
  require(p.lambda > 0.0, Errc::InvalidArgument, "lambda must be positive");
  Vector x0(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    x0[static_cast<Eigen::Index>(i)] = (i % 2 ? -1.0 : 1.0) * (3.0 - static_cast<double>(i % 3));
  }
  Problem out;
  out.f = sum({half_squared_norm(n), neg_l1_norm(n, p.lambda)});
  out.x0 = pick_x0(p, n, std::move(x0));
  out.lipschitz = 1.0;
  out.f_star = -0.5 * p.lambda * p.lambda * static_cast<double>(n);
  out.norm = NormChoice::L1;
  out.max_iter = 10000;
  return out;
}

inline Problem l1_least_squares(const ProblemParams& p) {
  auto [a, y] = linear_data(p, 4, 2.0);
  const auto n = static_cast<std::size_t>(a.cols());
  require(p.lambda > 0.0, Errc::InvalidArgument, "lambda must be positive");
  Problem out;
  out.f = sum({least_squares(a, y), l1_norm(n, p.lambda)});
  out.x0 = pick_x0(p, n, Vector::Zero(static_cast<Eigen::Index>(n)));
  out.f_star = 0.0;
  out.norm = NormChoice::LInf;
  out.max_iter = 5000;
  return out;
}

// min_i { 1/2 |x|^2 - <a_i, x> - c_i }, the min form of a difference of max functions.
inline Problem dmax(const ProblemParams& p) {
  const std::size_t n = pick_dim(p, 2);
  const std::size_t pieces = 3;
  Rng rng(p.seed);
  std::vector<ModelPtr> members;
  double f_star = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pieces; ++i) {
    const Point a = rng.normal_vector(n);
    const double c = rng.uniform(-0.5, 0.5);
    members.push_back(smooth_model(
        n, [a, c](const Point& x) { return 0.5 * x.vec().squaredNorm() - dot(a, x) - c; },
        [a](const Point& x) { return x - a; }, 1.0, "piece" + std::to_string(i)));
    f_star = std::min(f_star, -0.5 * a.vec().squaredNorm() - c);
  }
  Problem out;
  out.f = pointwise_min(std::move(members));
  out.x0 = pick_x0(p, n, Vector::Constant(static_cast<Eigen::Index>(n), 2.0));
  out.lipschitz = 1.0;
  out.f_star = f_star;
  out.norm = NormChoice::L1;
  out.max_iter = 10000;
  return out;
}

// Moreau-smoothed zero norm plus a quadratic penalty on A x = y.
inline Problem sparse_moreau(const ProblemParams& p) {
  auto [a, y] = linear_data(p, 6, 0.5);
  const auto n = static_cast<std::size_t>(a.cols());
  const double rho = p.rho.value_or(1.0);
  require(rho > 0.0, Errc::NonpositiveScale, "rho must be positive");
  require(p.r > 0.0, Errc::InvalidArgument, "r must be positive");
  Vector least_norm = a.completeOrthogonalDecomposition().solve(y);
  Problem out;
  out.f = sum({moreau_envelope(*zero_norm(n), p.r), scale(least_squares(a, y), rho)});
  out.x0 = pick_x0(p, n, std::move(least_norm));
  out.lipschitz = rho * lambda_max(a) + 1.0 / p.r;
  out.f_star = 0.0;
  out.norm = NormChoice::L1;
  out.max_iter = 10000;
  return out;
}

inline Problem relu_net(const ProblemParams& p) {
  const std::size_t hidden = pick_dim(p, 3);
  const std::vector<std::size_t> widths{2, hidden, 1};
  Rng rng(p.seed);
  std::vector<Sample> data;
  for (int i = 0; i < 8; ++i) {
    const Point in = rng.uniform_box(2, -1.0, 1.0);
    data.push_back({in, Point{std::max(0.0, in[0] + in[1]) - 0.5 * in[0]}});
  }
  const std::size_t params = network_parameter_count(widths);
  Problem out;
  out.f = relu_network_loss(widths, std::move(data));
  out.x0 = pick_x0(p, params, Vector(0.5 * rng.normal_vector(params).vec()));
  out.f_star = 0.0;
  out.norm = NormChoice::L2;
  out.max_iter = 2000;
  out.epsilon = 1e-2;
  return out;
}

// 1/2 |x - 1|^2 + rho dist(-x; complementarity set), x in R^{2k}.
inline Problem mpcc_penalty(const ProblemParams& p) {
  const std::size_t k = pick_dim(p, 1);
  const std::size_t n = 2 * k;
  const double rho = p.rho.value_or(2.0);
  const auto dim = static_cast<Eigen::Index>(n);
  Vector x0(dim);
  x0.head(static_cast<Eigen::Index>(k)).setConstant(2.0);
  x0.tail(static_cast<Eigen::Index>(k)).setConstant(1.5);
  Problem out;
  out.f = penalize(half_squared_distance(Point(Vector(Vector::Ones(dim)))),
                   affine_map(Matrix(-Matrix::Identity(dim, dim)), Vector::Zero(dim)), complementarity_set(k), rho);
  out.x0 = pick_x0(p, n, std::move(x0));
  out.f_star = 0.5 * static_cast<double>(k);
  out.norm = NormChoice::L2;
  out.max_iter = 5000;
  return out;
}

}  // namespace detail

inline const std::vector<ProblemSpec>& registry() {
  static const std::vector<ProblemSpec> specs{
      {"dc_quadratic_l1", "1/2|x|^2 - lambda|x|_1; concave subderivative, L = 1", {"concave-subderivative", "descent"},
       detail::dc_quadratic_l1},
      {"l1_least_squares", "1/2|Ax - y|^2 + lambda|x|_1; separable subderivative", {"separable"},
       detail::l1_least_squares},
      {"dmax", "min_i {1/2|x|^2 - <a_i, x> - c_i}; concave subderivative, L = 1", {"concave-subderivative", "descent"},
       detail::dmax},
      {"sparse_moreau", "e_r|x|_0 + rho/2 |Ax - y|^2; L = rho |A|^2 + 1/r", {"concave-subderivative", "descent"},
       detail::sparse_moreau},
      {"relu_net", "mean squared loss of a 2-d-1 ReLU network", {"semi-differentiable"}, detail::relu_net},
      {"mpcc_penalty", "1/2|x - 1|^2 + rho dist(-x; complementarity set)", {"semi-differentiable"},
       detail::mpcc_penalty},
  };
  return specs;
}

inline const ProblemSpec* find_problem(const std::string& name) {
  for (const auto& s : registry()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

}  // namespace subdiff::bench
