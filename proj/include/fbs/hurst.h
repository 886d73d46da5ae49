#pragma once

#include <cstddef>
#include <vector>

namespace fbs {

using Point = std::vector<double>;

struct HurstVector {
  std::vector<double> h;             // stored order
  int n_axes = 0;
  int ambient_dim = 1;
  std::vector<int> sort_perm;        // sort_perm[k] = stored index of k-th smallest

  // Ascending view H_1 <= ... <= H_N.
  std::vector<double> sorted() const;
  double min_h() const;
  double inv_sum() const;            // sum of 1/H_l
};

HurstVector validate_hurst(const std::vector<double>& raw, int d);

// Same values, stored order already ascending.
HurstVector sorted_hurst(const HurstVector& H);

struct Box {
  Point lower;
  Point upper;

  std::size_t dim() const { return lower.size(); }
  double volume() const;
  bool contains(const Point& t) const;
};

// Checks lower < upper per axis; with require_positive also lower > 0.
void validate_box(const Box& box, bool require_positive);

// Cube [a, a + r] in every axis.
Box cube(const Point& a, double r);

}  // namespace fbs
