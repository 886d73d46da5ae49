#pragma once

#include <cstddef>
#include <vector>

#include "fbs/hurst.h"

namespace fbs {

// Tensor-product evaluation grid. Points are enumerated row-major with the last
// axis fastest. Each coordinate carries a cell width used by Riemann sums; a
// width of zero marks an auxiliary node (e.g. a corner anchor) that is sampled
// but does not carry time mass.
class Grid {
 public:
  Grid() = default;
  Grid(std::vector<std::vector<double>> coords, std::vector<std::vector<double>> widths);

  // Cell midpoints of `cells[l]` equal cells per axis; optionally prepend the
  // lower corner as a zero-width anchor node on every axis.
  static Grid midpoint(const Box& box, const std::vector<int>& cells, bool corner_anchor = false);
  // Arbitrary increasing coordinates; widths from midpoints between neighbours,
  // clipped to [first, last].
  static Grid from_coords(std::vector<std::vector<double>> coords);

  int n_axes() const { return static_cast<int>(coords_.size()); }
  std::size_t size() const { return size_; }
  const std::vector<double>& axis(int l) const { return coords_[l]; }
  const std::vector<double>& widths(int l) const { return widths_[l]; }
  std::vector<std::size_t> shape() const;

  Point point(std::size_t index) const;
  std::vector<std::size_t> multi_index(std::size_t index) const;
  std::size_t flat_index(const std::vector<std::size_t>& mi) const;
  double cell_volume(std::size_t index) const;
  std::vector<Point> points() const;

  // Index of the grid node nearest to t (per axis, ties to the lower node).
  std::vector<std::size_t> nearest(const Point& t) const;

  // Largest cell width over all axes.
  double max_spacing() const;

 private:
  std::vector<std::vector<double>> coords_;
  std::vector<std::vector<double>> widths_;
  std::size_t size_ = 0;
};

}  // namespace fbs
