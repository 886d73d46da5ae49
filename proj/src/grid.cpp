#include "fbs/grid.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fbs/errors.h"

namespace fbs {

Grid::Grid(std::vector<std::vector<double>> coords, std::vector<std::vector<double>> widths)
    : coords_(std::move(coords)), widths_(std::move(widths)) {
  if (coords_.empty() || coords_.size() != widths_.size()) throw ArityError("grid: axis count");
  size_ = 1;
  for (std::size_t l = 0; l < coords_.size(); ++l) {
    const auto& c = coords_[l];
    if (c.empty() || c.size() != widths_[l].size()) throw ArityError("grid: axis length");
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!(c[i] > 0.0)) throw DomainError("grid: coordinates must be positive on axis " + std::to_string(l + 1));
      if (i > 0 && !(c[i] > c[i - 1])) {
        throw DomainError("grid: coordinates must be strictly increasing on axis " + std::to_string(l + 1));
      }
      if (widths_[l][i] < 0.0) throw DomainError("grid: negative cell width");
    }
    size_ *= c.size();
  }
}

Grid Grid::midpoint(const Box& box, const std::vector<int>& cells, bool corner_anchor) {
  validate_box(box, true);
  if (cells.size() != box.dim()) throw ArityError("grid: cells per axis must match box dimension");
  std::vector<std::vector<double>> coords(cells.size()), widths(cells.size());
  for (std::size_t l = 0; l < cells.size(); ++l) {
    if (cells[l] < 1) throw DomainError("grid: need at least one cell per axis");
    const double step = (box.upper[l] - box.lower[l]) / cells[l];
    if (corner_anchor) {
      coords[l].push_back(box.lower[l]);
      widths[l].push_back(0.0);
    }
    for (int i = 0; i < cells[l]; ++i) {
      coords[l].push_back(box.lower[l] + (i + 0.5) * step);
      widths[l].push_back(step);
    }
  }
  return Grid(std::move(coords), std::move(widths));
}

Grid Grid::from_coords(std::vector<std::vector<double>> coords) {
  std::vector<std::vector<double>> widths(coords.size());
  for (std::size_t l = 0; l < coords.size(); ++l) {
    const auto& c = coords[l];
    auto& w = widths[l];
    w.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double lo = i == 0 ? c[i] : 0.5 * (c[i - 1] + c[i]);
      const double hi = i + 1 == c.size() ? c[i] : 0.5 * (c[i] + c[i + 1]);
      w[i] = hi - lo;
    }
    if (c.size() == 1) w[0] = 1.0;
  }
  return Grid(std::move(coords), std::move(widths));
}

std::vector<std::size_t> Grid::shape() const {
  std::vector<std::size_t> s;
  for (const auto& c : coords_) s.push_back(c.size());
  return s;
}

std::vector<std::size_t> Grid::multi_index(std::size_t index) const {
  std::vector<std::size_t> mi(coords_.size());
  for (std::size_t l = coords_.size(); l-- > 0;) {
    mi[l] = index % coords_[l].size();
    index /= coords_[l].size();
  }
  return mi;
}

std::size_t Grid::flat_index(const std::vector<std::size_t>& mi) const {
  std::size_t idx = 0;
  for (std::size_t l = 0; l < coords_.size(); ++l) idx = idx * coords_[l].size() + mi[l];
  return idx;
}

Point Grid::point(std::size_t index) const {
  const auto mi = multi_index(index);
  Point p(coords_.size());
  for (std::size_t l = 0; l < p.size(); ++l) p[l] = coords_[l][mi[l]];
  return p;
}

double Grid::cell_volume(std::size_t index) const {
  const auto mi = multi_index(index);
  double v = 1.0;
  for (std::size_t l = 0; l < mi.size(); ++l) v *= widths_[l][mi[l]];
  return v;
}

std::vector<Point> Grid::points() const {
  std::vector<Point> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) out.push_back(point(i));
  return out;
}

std::vector<std::size_t> Grid::nearest(const Point& t) const {
  if (t.size() != coords_.size()) throw ArityError("grid: point arity");
  std::vector<std::size_t> mi(t.size());
  for (std::size_t l = 0; l < t.size(); ++l) {
    const auto& c = coords_[l];
    auto it = std::lower_bound(c.begin(), c.end(), t[l]);
    if (it == c.end()) {
      mi[l] = c.size() - 1;
    } else if (it == c.begin()) {
      mi[l] = 0;
    } else {
      const auto j = static_cast<std::size_t>(it - c.begin());
      mi[l] = (t[l] - c[j - 1] <= c[j] - t[l]) ? j - 1 : j;
    }
  }
  return mi;
}

double Grid::max_spacing() const {
  double m = 0.0;
  for (const auto& w : widths_) {
    for (double x : w) m = std::max(m, x);
  }
  return m;
}

}  // namespace fbs
