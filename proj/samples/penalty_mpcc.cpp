// Penalized complementarity problem:
//   min 1/2 |x - c|^2 + rho dist(x; {<y, z> = 0, y <= 0, z <= 0}).

#include <iostream>

#include "subdiff/subdiff.hpp"

int main() {
  using namespace subdiff;
  const std::size_t pairs = 2;
  // Layout (y1, y2, z1, z2). The unconstrained minimizer c is infeasible.
  const Point c{-1.0, 0.5, -2.0, -0.3};
  const auto f = penalize(half_squared_distance(c), identity_map(2 * pairs), complementarity_set(pairs), 10.0);

  SolverConfig cfg;
  cfg.epsilon = 1e-6;
  cfg.norm = NormChoice::L2;
  cfg.max_iter = 5000;
  // The minimizer sits on a ray, where the L2 search falls back to sampling;
  // NoDescentFound is the expected exit there.
  const Trace t = run(*f, Point{1.0, 1.0, 1.0, 1.0}, cfg);

  std::cout << "status   " << to_string(t.status) << " after " << t.steps() << " steps\n"
            << "x        " << t.final_x << "\n"
            << "f(x)     " << t.final_f << "\n";
  const auto set = complementarity_set(pairs);
  std::cout << "feasible " << (set->contains(t.final_x) ? "yes" : "no") << "\n";
  return 0;
}
