#include "fbs/quadrature.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "fbs/errors.h"

namespace fbs {

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                     double abs_tol, unsigned max_depth) {
  QuadResult out;
  if (a == b) return out;
  double l1 = 0.0;
  out.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth,
                                                                           rel_tol, &out.error, &l1);
  const double budget = std::max(rel_tol * l1, abs_tol);
  if (!std::isfinite(out.value) || out.error > 10.0 * budget + 1e-300) {
    std::ostringstream msg;
    msg << "quadrature on [" << a << ", " << b << "] did not converge: error " << out.error
        << " vs budget " << budget;
    throw NumericalError(msg.str(), out.error);
  }
  return out;
}

}  // namespace fbs
