// Subderivative of |.|_1 composed with a ReLU layer, against finite differences.

#include <iomanip>
#include <iostream>

#include "subdiff/subdiff.hpp"

int main() {
  using namespace subdiff;
  Matrix a(2, 3);
  a << 1.0, -1.0, 0.0, 0.5, 0.5, -1.0;
  const Vector b = Vector::Zero(2);
  // g(F(x)) with F(x) = max(Ax, 0).
  const auto f = precompose_semidiff(l1_norm(2), precompose_semidiff(relu_map(2), affine_map(a, b)));

  // x sits on the kink of the first unit: (Ax)_1 = 0.
  const Point x{1.0, 1.0, 2.0};
  std::cout << std::setprecision(10);
  for (const Point& w : {Point{1.0, 0.0, 0.0}, Point{-1.0, 0.0, 0.0}, Point{0.3, -0.2, 0.1}}) {
    const ExtReal closed = f->subderivative(x, w);
    const FDResult fd = fd_subderivative(*f, x, w);
    std::cout << "w = " << w << "  closed " << closed << "  fd " << fd.estimate << "\n";
  }

  // The same composite through the forward chain of a one-layer network.
  Rng rng(5);
  std::vector<Sample> data;
  for (int i = 0; i < 4; ++i) data.push_back({rng.normal_vector(2), rng.normal_vector(1)});
  const auto loss = relu_network_loss({2, 3, 1}, data);
  const Point theta = rng.normal_vector(loss->dimension());
  const Point dtheta = rng.normal_vector(loss->dimension());
  std::cout << "network loss  closed " << loss->subderivative(theta, dtheta) << "  fd "
            << fd_subderivative(*loss, theta, dtheta).estimate << "\n";
  return 0;
}
