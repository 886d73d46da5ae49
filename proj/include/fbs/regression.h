#pragma once

#include <vector>

namespace fbs {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_ = 0.0;  // standard error of the slope
};

// Weighted least squares of log(value) on log(r). Empty weights mean equal
// weights. The slope standard error uses the weighted residual variance.
FitResult fit_exponent(const std::vector<double>& r, const std::vector<double>& value,
                       const std::vector<double>& weights = {});

// Ordinary least squares on already transformed coordinates.
FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& weights = {});

}  // namespace fbs
