// Minimize f(x) = 1/2 |x|^2 - |x|_1 with the subderivative method.

#include <iostream>

#include "subdiff/subdiff.hpp"

int main() {
  using namespace subdiff;
  const auto f = sum({half_squared_norm(3), neg_l1_norm(3)});

  SolverConfig cfg;
  cfg.epsilon = 1e-6;
  cfg.norm = NormChoice::L1;
  cfg.max_iter = 1000;
  const Trace t = run(*f, Point{3.0, -0.5, 0.25}, cfg);

  std::cout << "status     " << to_string(t.status) << "\n"
            << "steps      " << t.steps() << "\n"
            << "x          " << t.final_x << "\n"
            << "f(x)       " << t.final_f << "\n"
            << "d f(x)     " << t.final_dir_value << (t.certified ? " (exact)" : "") << "\n";

  // Every coordinate of a d-stationary point of this f is +-1.
  const StationarityCheck c = check_d_stationary(*f, t.final_x, 1e-6, NormChoice::L1);
  std::cout << "stationary " << (c.is_stationary ? "yes" : "no") << "\n";
  return c.is_stationary ? 0 : 1;
}
