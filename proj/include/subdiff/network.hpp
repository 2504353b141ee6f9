#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "subdiff/calculus.hpp"
#include "subdiff/error.hpp"
#include "subdiff/maps.hpp"
#include "subdiff/model.hpp"
#include "subdiff/point.hpp"

namespace subdiff {

struct Sample {
  Point input;
  Point target;
};

namespace detail {

// Parameter layout: for each layer i, W_i (rows = widths[i+1], row-major)
// followed by b_i. Layer output is W_i z - b_i.
struct LayerSlice {
  std::size_t offset;  // start of W_i in theta
  std::size_t rows, cols;
  std::size_t bias_offset() const { return offset + rows * cols; }
};

// (theta, z) -> (theta, W z - b): smooth, bilinear in (W, z).
class AffineLayerMap final : public SmoothMap {
 public:
  AffineLayerMap(std::size_t params, LayerSlice slice) : p_(params), s_(slice) {}

  std::size_t dimension_in() const override { return p_ + s_.cols; }
  std::size_t dimension_out() const override { return p_ + s_.rows; }

  Point eval(const Point& x) const override {
    Vector out(static_cast<Eigen::Index>(p_ + s_.rows));
    out.head(static_cast<Eigen::Index>(p_)) = x.vec().head(static_cast<Eigen::Index>(p_));
    for (std::size_t r = 0; r < s_.rows; ++r) {
      double acc = -x[s_.bias_offset() + r];
      for (std::size_t c = 0; c < s_.cols; ++c) acc += x[s_.offset + r * s_.cols + c] * x[p_ + c];
      out[static_cast<Eigen::Index>(p_ + r)] = acc;
    }
    return Point(std::move(out));
  }

  // d(Wz - b) = dW z + W dz - db
  Point jacobian_apply(const Point& x, const Point& w) const override {
    Vector out(static_cast<Eigen::Index>(p_ + s_.rows));
    out.head(static_cast<Eigen::Index>(p_)) = w.vec().head(static_cast<Eigen::Index>(p_));
    for (std::size_t r = 0; r < s_.rows; ++r) {
      double acc = -w[s_.bias_offset() + r];
      for (std::size_t c = 0; c < s_.cols; ++c) {
        const std::size_t k = s_.offset + r * s_.cols + c;
        acc += w[k] * x[p_ + c] + x[k] * w[p_ + c];
      }
      out[static_cast<Eigen::Index>(p_ + r)] = acc;
    }
    return Point(std::move(out));
  }

 private:
  std::size_t p_;
  LayerSlice s_;
};

// (theta, z) -> (theta, max{0, z}).
class TailReluMap final : public SemiDiffMap {
 public:
  TailReluMap(std::size_t params, std::size_t width) : p_(params), n_(width) {}

  std::size_t dimension_in() const override { return p_ + n_; }
  std::size_t dimension_out() const override { return p_ + n_; }

  Point eval(const Point& x) const override {
    Vector out = x.vec();
    out.tail(static_cast<Eigen::Index>(n_)) = out.tail(static_cast<Eigen::Index>(n_)).cwiseMax(0.0);
    return Point(std::move(out));
  }

  Point semiderivative(const Point& x, const Point& w) const override {
    Vector out = w.vec();
    for (std::size_t i = p_; i < p_ + n_; ++i) out[static_cast<Eigen::Index>(i)] = relu_semiderivative(x[i], w[i]);
    return Point(std::move(out));
  }

 private:
  std::size_t p_, n_;
};

class ReluNetworkLoss final : public FunctionModel {
 public:
  ReluNetworkLoss(std::vector<std::size_t> widths, std::vector<Sample> data, bool relu_output)
      : widths_(std::move(widths)), data_(std::move(data)) {
    require(widths_.size() >= 2, Errc::InvalidArgument, "network needs at least input and output widths");
    require(!data_.empty(), Errc::EmptyList, "network loss needs at least one sample");
    for (auto w : widths_) require(w > 0, Errc::InvalidArgument, "layer width must be positive");
    std::vector<LayerSlice> slices;
    for (std::size_t i = 0; i + 1 < widths_.size(); ++i) {
      slices.push_back({params_, widths_[i + 1], widths_[i]});
      params_ += widths_[i + 1] * widths_[i] + widths_[i + 1];
    }
    for (std::size_t i = 0; i < slices.size(); ++i) {
      layers_.push_back(std::make_shared<AffineLayerMap>(params_, slices[i]));
      const bool last = i + 1 == slices.size();
      if (!last || relu_output) layers_.push_back(std::make_shared<TailReluMap>(params_, slices[i].rows));
    }
    for (const auto& s : data_) {
      if (s.input.size() != widths_.front() || s.target.size() != widths_.back()) {
        throw Error(Errc::DimensionMismatch, "sample does not match the network widths");
      }
    }
  }

  std::size_t dimension() const override { return params_; }
  std::string name() const override { return "relu_network_loss"; }

  ExtReal value(const Point& theta) const override {
    require_dim(theta, params_, "network parameters");
    double total = 0.0;
    for (const auto& s : data_) {
      const Vector r = output(theta, s.input).vec() - s.target.vec();
      total += r.squaredNorm();
    }
    return total / static_cast<double>(data_.size());
  }

  ExtReal subderivative(const Point& theta, const Point& dtheta) const override {
    require_dim(theta, params_, "network parameters");
    require_dim(dtheta, params_, "network direction");
    const auto n0 = static_cast<Eigen::Index>(widths_.front());
    const auto p = static_cast<Eigen::Index>(params_);
    double total = 0.0;
    for (const auto& s : data_) {
      Vector x(p + n0), w(p + n0);
      x << theta.vec(), s.input.vec();
      w << dtheta.vec(), Vector::Zero(n0);
      const auto [out, dout] = forward_chain(layers_, Point(std::move(x)), Point(std::move(w)));
      const auto m = static_cast<Eigen::Index>(widths_.back());
      total += 2.0 * (out.vec().tail(m) - s.target.vec()).dot(dout.vec().tail(m));
    }
    return total / static_cast<double>(data_.size());
  }

  bool semi_differentiable() const override { return true; }
  std::optional<double> lower_bound() const override { return 0.0; }

  /// Network output f(theta; input).
  Point output(const Point& theta, const Point& input) const {
    const auto p = static_cast<Eigen::Index>(params_);
    Vector x(p + static_cast<Eigen::Index>(input.size()));
    x << theta.vec(), input.vec();
    Point state(std::move(x));
    for (const auto& layer : layers_) state = layer->eval(state);
    return Point(Vector(state.vec().tail(static_cast<Eigen::Index>(widths_.back()))));
  }

 private:
  std::vector<std::size_t> widths_;
  std::vector<Sample> data_;
  std::size_t params_ = 0;
  std::vector<SemiDiffMapPtr> layers_;
};

}  // namespace detail

/// Mean squared loss of a fully connected ReLU network over its parameters.
/// The output layer is affine unless `relu_output` is set.
inline ModelPtr relu_network_loss(std::vector<std::size_t> widths, std::vector<Sample> data,
                                  bool relu_output = false) {
  return std::make_shared<detail::ReluNetworkLoss>(std::move(widths), std::move(data), relu_output);
}

/// Number of parameters of a network with the given widths.
inline std::size_t network_parameter_count(const std::vector<std::size_t>& widths) {
  std::size_t p = 0;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) p += widths[i + 1] * widths[i] + widths[i + 1];
  return p;
}

}  // namespace subdiff
