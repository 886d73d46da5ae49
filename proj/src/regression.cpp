#include "fbs/regression.h"

#include <cmath>

#include "fbs/errors.h"

namespace fbs {

FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& weights) {
  const std::size_t n = x.size();
  if (n != y.size() || (!weights.empty() && weights.size() != n)) throw ArityError("fit: length mismatch");
  if (n < 2) throw DomainError("fit: need at least two points");
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0.0)) throw DomainError("fit: weights must be positive");
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    sxx += w * (x[i] - mx) * (x[i] - mx);
    sxy += w * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit: abscissae are all equal");
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = weights.empty() ? 1.0 : weights[i];
      const double e = y[i] - f.intercept - f.slope * x[i];
      rss += w * e * e;
    }
    // Weights are treated as relative: scale by the residual variance.
    const double s2 = rss / static_cast<double>(n - 2);
    f.stderr_ = std::sqrt(s2 / sxx);
  }
  return f;
}

FitResult fit_exponent(const std::vector<double>& r, const std::vector<double>& value,
                       const std::vector<double>& weights) {
  if (r.size() < 3) throw DomainError("fit_exponent: need at least three pairs");
  if (r.size() != value.size()) throw ArityError("fit_exponent: length mismatch");
  std::vector<double> lx(r.size()), ly(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0.0)) throw DomainError("fit_exponent: radii must be positive");
    if (!(value[i] > 0.0)) throw DomainError("fit_exponent: values must be positive");
    lx[i] = std::log(r[i]);
    ly[i] = std::log(value[i]);
  }
  return fit_line(lx, ly, weights);
}

}  // namespace fbs
