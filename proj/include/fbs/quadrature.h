#pragma once

#include <functional>

namespace fbs {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
};

// Adaptive Gauss-Kronrod (15 point) on a finite interval. Throws NumericalError
// if the estimated error exceeds max(rel_tol * L1, abs_tol) after max_depth
// bisections.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                     double abs_tol = 0.0, unsigned max_depth = 30);

}  // namespace fbs
