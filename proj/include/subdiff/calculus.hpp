#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subdiff/error.hpp"
#include "subdiff/maps.hpp"
#include "subdiff/model.hpp"
#include "subdiff/point.hpp"

// Combinators that build new models from old ones. Qualification conditions
// (metric subregularity for the chain rule, the sum qualification) are
// contracts on the caller and are never checked at runtime.

namespace subdiff {

namespace detail {

inline void require_models(const std::vector<ModelPtr>& models, const char* what) {
  if (models.empty()) throw Error(Errc::EmptyList, std::string(what) + ": no models");
  for (const auto& m : models) require(static_cast<bool>(m), Errc::InvalidArgument, "null model");
  const std::size_t n = models.front()->dimension();
  for (const auto& m : models) {
    if (m->dimension() != n) throw Error(Errc::DimensionMismatch, std::string(what) + ": members differ in dimension");
  }
}

template <typename Fn>
std::optional<double> sum_if_all(const std::vector<ModelPtr>& models, Fn get) {
  double total = 0.0;
  for (const auto& m : models) {
    const auto v = get(*m);
    if (!v) return std::nullopt;
    total += *v;
  }
  return total;
}

class SumModel final : public FunctionModel {
 public:
  explicit SumModel(std::vector<ModelPtr> models) : models_(std::move(models)) { require_models(models_, "sum"); }

  std::size_t dimension() const override { return models_.front()->dimension(); }
  std::string name() const override {
    std::string s = "sum(";
    for (std::size_t i = 0; i < models_.size(); ++i) s += (i ? "," : "") + models_[i]->name();
    return s + ")";
  }

  // Members are accumulated left to right, starting from the first one.
  ExtReal value(const Point& x) const override {
    ExtReal total = models_.front()->value(x);
    for (std::size_t i = 1; i < models_.size(); ++i) total = ext_add(total, models_[i]->value(x));
    return total;
  }
  ExtReal subderivative(const Point& x, const Point& w) const override {
    ExtReal total = models_.front()->subderivative(x, w);
    for (std::size_t i = 1; i < models_.size(); ++i) total = ext_add(total, models_[i]->subderivative(x, w));
    return total;
  }

  bool semi_differentiable() const override {
    return std::all_of(models_.begin(), models_.end(), [](const auto& m) { return m->semi_differentiable(); });
  }
  bool directionally_lower_regular() const override {
    return std::all_of(models_.begin(), models_.end(),
                       [](const auto& m) { return m->directionally_lower_regular(); });
  }
  bool concave_subderivative() const override {
    return std::all_of(models_.begin(), models_.end(), [](const auto& m) { return m->concave_subderivative(); });
  }
  std::optional<double> descent_constant() const override {
    return sum_if_all(models_, [](const FunctionModel& m) { return m.descent_constant(); });
  }
  std::optional<double> lower_bound() const override {
    return sum_if_all(models_, [](const FunctionModel& m) { return m.lower_bound(); });
  }

  std::optional<Point> gradient(const Point& x) const override {
    std::optional<Point> total;
    for (const auto& m : models_) {
      auto g = m->gradient(x);
      if (!g) return std::nullopt;
      total = total ? *total + *g : *g;
    }
    return total;
  }

  std::optional<SeparableForm> separable_form(const Point& x) const override {
    std::optional<SeparableForm> total;
    for (const auto& m : models_) {
      auto f = m->separable_form(x);
      if (!f) return std::nullopt;
      if (!total) {
        total = std::move(f);
        continue;
      }
      total->gradient = total->gradient + f->gradient;
      for (std::size_t i = 0; i < total->parts.size(); ++i) total->parts[i] = total->parts[i] + f->parts[i];
    }
    return total;
  }

 private:
  std::vector<ModelPtr> models_;
};

class ScaledModel final : public FunctionModel {
 public:
  ScaledModel(ModelPtr inner, double lambda) : inner_(std::move(inner)), lambda_(lambda) {
    require(static_cast<bool>(inner_), Errc::InvalidArgument, "null model");
    if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw Error(Errc::NonpositiveScale, "scale must be positive");
  }

  std::size_t dimension() const override { return inner_->dimension(); }
  std::string name() const override { return std::to_string(lambda_) + "*" + inner_->name(); }

  ExtReal value(const Point& x) const override { return scale_positive(lambda_, inner_->value(x)); }
  ExtReal subderivative(const Point& x, const Point& w) const override {
    return scale_positive(lambda_, inner_->subderivative(x, w));
  }

  bool semi_differentiable() const override { return inner_->semi_differentiable(); }
  bool directionally_lower_regular() const override { return inner_->directionally_lower_regular(); }
  bool concave_subderivative() const override { return inner_->concave_subderivative(); }
  std::optional<double> descent_constant() const override {
    if (auto l = inner_->descent_constant()) return lambda_ * *l;
    return std::nullopt;
  }
  std::optional<double> lower_bound() const override {
    if (auto l = inner_->lower_bound()) return lambda_ * *l;
    return std::nullopt;
  }
  std::optional<Point> gradient(const Point& x) const override {
    if (auto g = inner_->gradient(x)) return lambda_ * *g;
    return std::nullopt;
  }
  std::optional<SeparableForm> separable_form(const Point& x) const override {
    auto f = inner_->separable_form(x);
    if (!f) return std::nullopt;
    f->gradient = lambda_ * f->gradient;
    for (auto& part : f->parts) part = lambda_ * part;
    return f;
  }

 private:
  ModelPtr inner_;
  double lambda_;
};

// g o F with F smooth: d(g o F)(x)(w) = d g(F(x))(F'(x) w).
class SmoothComposite final : public FunctionModel {
 public:
  SmoothComposite(ModelPtr g, SmoothMapPtr f, std::optional<double> concave_modulus)
      : g_(std::move(g)), f_(std::move(f)), concave_modulus_(concave_modulus) {
    require(g_ && f_, Errc::InvalidArgument, "null model or map");
    if (g_->dimension() != f_->dimension_out()) {
      throw Error(Errc::DimensionMismatch, "precompose: outer dimension does not match map output");
    }
    require(!concave_modulus_ || *concave_modulus_ >= 0.0, Errc::InvalidArgument, "concave modulus must be >= 0");
  }

  std::size_t dimension() const override { return f_->dimension_in(); }
  std::string name() const override { return g_->name() + "∘F"; }

  ExtReal value(const Point& x) const override { return g_->value(f_->eval(x)); }
  ExtReal subderivative(const Point& x, const Point& w) const override {
    return g_->subderivative(f_->eval(x), f_->jacobian_apply(x, w));
  }

  bool semi_differentiable() const override { return g_->semi_differentiable(); }
  bool concave_subderivative() const override { return g_->concave_subderivative(); }
  std::optional<double> lower_bound() const override { return g_->lower_bound(); }

  // A concave modulus l asserts g concave; with F' L-Lipschitz this gives l * L.
  // For affine F = A x + b the outer constant scales by |A|_2^2.
  std::optional<double> descent_constant() const override {
    const auto smooth = f_->smoothness_constant();
    if (concave_modulus_ && smooth) {
      return *concave_modulus_ * *smooth;
    }
    if (const auto* affine = dynamic_cast<const AffineMap*>(f_.get())) {
      if (auto lg = g_->descent_constant()) {
        const Eigen::JacobiSVD<Matrix> svd(affine->matrix());
        const double s = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
        return *lg * s * s;
      }
    }
    return std::nullopt;
  }

  std::optional<Point> gradient(const Point& x) const override {
    const Point y = f_->eval(x);
    auto gy = g_->gradient(y);
    if (!gy) return std::nullopt;
    return f_->jacobian_transpose_apply(x, *gy);
  }

 private:
  ModelPtr g_;
  SmoothMapPtr f_;
  std::optional<double> concave_modulus_;
};

class SemiDiffComposite final : public FunctionModel {
 public:
  SemiDiffComposite(ModelPtr g, SemiDiffMapPtr f) : g_(std::move(g)), f_(std::move(f)) {
    require(g_ && f_, Errc::InvalidArgument, "null model or map");
    if (g_->dimension() != f_->dimension_out()) {
      throw Error(Errc::DimensionMismatch, "precompose: outer dimension does not match map output");
    }
    if (!g_->semi_differentiable()) {
      throw Error(Errc::NotSemiDifferentiable, "outer model '" + g_->name() + "' is not semi-differentiable");
    }
  }

  std::size_t dimension() const override { return f_->dimension_in(); }
  std::string name() const override { return g_->name() + "∘G"; }

  ExtReal value(const Point& x) const override { return g_->value(f_->eval(x)); }
  ExtReal subderivative(const Point& x, const Point& w) const override {
    return g_->subderivative(f_->eval(x), f_->semiderivative(x, w));
  }
  bool semi_differentiable() const override { return true; }
  std::optional<double> lower_bound() const override { return g_->lower_bound(); }

 private:
  ModelPtr g_;
  SemiDiffMapPtr f_;
};

class ComposedMap final : public SemiDiffMap {
 public:
  ComposedMap(SemiDiffMapPtr outer, SemiDiffMapPtr inner) : outer_(std::move(outer)), inner_(std::move(inner)) {
    require(outer_ && inner_, Errc::InvalidArgument, "null map");
    if (outer_->dimension_in() != inner_->dimension_out()) {
      throw Error(Errc::DimensionMismatch, "compose: maps do not chain");
    }
  }
  std::size_t dimension_in() const override { return inner_->dimension_in(); }
  std::size_t dimension_out() const override { return outer_->dimension_out(); }
  Point eval(const Point& x) const override { return outer_->eval(inner_->eval(x)); }
  Point semiderivative(const Point& x, const Point& w) const override {
    return outer_->semiderivative(inner_->eval(x), inner_->semiderivative(x, w));
  }

 private:
  SemiDiffMapPtr outer_;
  SemiDiffMapPtr inner_;
};

class PointwiseExtremum final : public FunctionModel {
 public:
  PointwiseExtremum(std::vector<ModelPtr> models, bool is_max) : models_(std::move(models)), is_max_(is_max) {
    require_models(models_, is_max_ ? "pointwise_max" : "pointwise_min");
    for (const auto& m : models_) {
      if (!m->semi_differentiable()) {
        throw Error(Errc::NotSemiDifferentiable, "member '" + m->name() + "' is not semi-differentiable");
      }
    }
  }

  std::size_t dimension() const override { return models_.front()->dimension(); }
  std::string name() const override { return is_max_ ? "max" : "min"; }

  ExtReal value(const Point& x) const override {
    ExtReal best = finite_value(*models_.front(), x);
    for (std::size_t i = 1; i < models_.size(); ++i) best = pick(best, finite_value(*models_[i], x));
    return best;
  }

  ExtReal subderivative(const Point& x, const Point& w) const override {
    std::optional<ExtReal> best;
    for (std::size_t i : active_set(x)) {
      const ExtReal d = models_[i]->subderivative(x, w);
      best = best ? pick(*best, d) : d;
    }
    return *best;
  }

  std::optional<Point> gradient(const Point& x) const override {
    const auto active = active_set(x);
    if (active.size() != 1) return std::nullopt;
    return models_[active.front()]->gradient(x);
  }

  bool semi_differentiable() const override { return true; }
  bool concave_subderivative() const override {
    if (is_max_ && models_.size() > 1) return false;
    return std::all_of(models_.begin(), models_.end(), [](const auto& m) { return m->concave_subderivative(); });
  }
  // For min_i f_i, the member realizing the minimal active subderivative
  // bounds f from above, so the largest member constant carries over.
  std::optional<double> descent_constant() const override {
    if (is_max_ && models_.size() > 1) return std::nullopt;
    std::optional<double> worst = 0.0;
    for (const auto& m : models_) {
      const auto l = m->descent_constant();
      if (!l) return std::nullopt;
      worst = std::max(*worst, *l);
    }
    return worst;
  }
  std::optional<double> lower_bound() const override {
    std::optional<double> bound;
    for (const auto& m : models_) {
      const auto l = m->lower_bound();
      if (is_max_) {
        if (l) bound = bound ? std::max(*bound, *l) : *l;
      } else {
        if (!l) return std::nullopt;
        bound = bound ? std::min(*bound, *l) : *l;
      }
    }
    return bound;
  }

  /// Members whose value is within 1e-12 of the extremum.
  std::vector<std::size_t> active_set(const Point& x) const {
    std::vector<double> values;
    values.reserve(models_.size());
    for (const auto& m : models_) values.push_back(finite_value(*m, x).value());
    const double best = is_max_ ? *std::max_element(values.begin(), values.end())
                                : *std::min_element(values.begin(), values.end());
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (std::abs(values[i] - best) <= kActiveTolerance) active.push_back(i);
    }
    return active;
  }

  static constexpr double kActiveTolerance = 1e-12;

 private:
  ExtReal pick(const ExtReal& a, const ExtReal& b) const {
    if (is_max_) return b > a ? b : a;
    return b < a ? b : a;
  }
  static ExtReal finite_value(const FunctionModel& m, const Point& x) {
    ExtReal v = m.value(x);
    if (!v.is_finite()) throw Error(Errc::DomainViolation, "pointwise extremum member is not finite at x");
    return v;
  }

  std::vector<ModelPtr> models_;
  bool is_max_;
};

}  // namespace detail

/// Sum rule: values and subderivatives add; descent constants add when all are known.
inline ModelPtr sum(std::vector<ModelPtr> models) {
  return std::make_shared<detail::SumModel>(std::move(models));
}

inline ModelPtr scale(ModelPtr model, double lambda) {
  return std::make_shared<detail::ScaledModel>(std::move(model), lambda);
}

/// g o F for smooth F. When g is concave with Lipschitz modulus `concave_modulus`
/// on the region of interest, the composite inherits descent constant modulus * L_F.
inline ModelPtr precompose_smooth(ModelPtr g, SmoothMapPtr f, std::optional<double> concave_modulus = std::nullopt) {
  return std::make_shared<detail::SmoothComposite>(std::move(g), std::move(f), concave_modulus);
}

/// g o F for semi-differentiable g and F; the result is semi-differentiable.
inline ModelPtr precompose_semidiff(ModelPtr g, SemiDiffMapPtr f) {
  return std::make_shared<detail::SemiDiffComposite>(std::move(g), std::move(f));
}

/// G o F of two semi-differentiable maps.
inline SemiDiffMapPtr precompose_semidiff(SemiDiffMapPtr g, SemiDiffMapPtr f) {
  return std::make_shared<detail::ComposedMap>(std::move(g), std::move(f));
}

/// Runs x_i = F_i(x_{i-1}), u_i = dF_i(x_{i-1})(u_{i-1}) in a single forward pass
/// and returns the composite value and its semi-derivative at x in direction w.
inline std::pair<Point, Point> forward_chain(const std::vector<SemiDiffMapPtr>& layers, const Point& x,
                                             const Point& w) {
  require_dim(w, x.size(), "forward_chain direction");
  std::size_t dim = x.size();
  for (const auto& layer : layers) {
    require(static_cast<bool>(layer), Errc::InvalidArgument, "null layer");
    if (layer->dimension_in() != dim) throw Error(Errc::DimensionMismatch, "forward_chain: layers do not chain");
    dim = layer->dimension_out();
  }
  Point state = x;
  Point tangent = w;
  for (const auto& layer : layers) {
    Point next_tangent = layer->semiderivative(state, tangent);
    state = layer->eval(state);
    tangent = std::move(next_tangent);
  }
  return {std::move(state), std::move(tangent)};
}

/// max_i f_i over finite, semi-differentiable members. The subderivative is the
/// max of member subderivatives over the active set.
inline ModelPtr pointwise_max(std::vector<ModelPtr> models) {
  return std::make_shared<detail::PointwiseExtremum>(std::move(models), true);
}

inline ModelPtr pointwise_min(std::vector<ModelPtr> models) {
  return std::make_shared<detail::PointwiseExtremum>(std::move(models), false);
}

/// Descent constant L(1 + r)/r of [e_r g1] o F1 - g2 o F2 for convex g_i and
/// L-smooth F_i.
inline double dc_amenable_descent_constant(double smoothness, double r) {
  require(smoothness >= 0.0 && r > 0.0, Errc::InvalidArgument, "need L >= 0 and r > 0");
  return smoothness * (1.0 + r) / r;
}

}  // namespace subdiff
