#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "subdiff/point.hpp"

namespace subdiff {

// std::mt19937_64 output is fixed by the standard; the distributions are not,
// so uniform and normal draws are derived by hand to keep seeds portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  long long integer(long long lo, long long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
    return lo + static_cast<long long>(engine_() % span);
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  Point uniform_box(std::size_t n, double lo, double hi) {
    Vector v(static_cast<Eigen::Index>(n));
    for (auto& c : v) c = uniform(lo, hi);
    return Point(std::move(v));
  }

  Point normal_vector(std::size_t n) {
    Vector v(static_cast<Eigen::Index>(n));
    for (auto& c : v) c = normal();
    return Point(std::move(v));
  }

  /// Uniform on the Euclidean unit sphere.
  Point unit_sphere(std::size_t n) {
    for (;;) {
      Vector v = normal_vector(n).vec();
      const double r = v.norm();
      if (r > 1e-300) return Point(Vector(v / r));
    }
  }

  /// Independent stream for sub-task `index`.
  Rng split(std::uint64_t index) const { return Rng(splitmix64(base_seed_mix() ^ splitmix64(index + 1))); }

  static std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t base_seed_mix() const {
    std::mt19937_64 copy = engine_;
    return copy();
  }

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace subdiff
