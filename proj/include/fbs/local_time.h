#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "fbs/gaussian_engine.h"
#include "fbs/hurst.h"

namespace fbs {

// How to lay out spatial bins. With `window_from_sample` the window is
// [min - margin bins, max + margin bins] per channel, snapped to a lattice that
// has a bin centred on `anchor`; otherwise `lower`/`bins` are used as given and
// values outside are booked as overflow.
struct LatticeSpec {
  double width = 0.01;
  std::vector<double> anchor;  // per channel, default 0
  bool window_from_sample = true;
  int margin = 3;
  std::vector<double> lower;   // fixed window only
  std::vector<int> bins;       // fixed window only
};

struct BinLattice {
  std::vector<double> lower;  // lower edge per channel
  double width = 0.0;
  std::vector<int> bins;      // per channel

  int d() const { return static_cast<int>(lower.size()); }
  std::size_t size() const;
  double bin_volume() const;
  // Flat bin index, or -1 if outside the window.
  long locate(const double* x) const;
  std::vector<double> center(std::size_t flat) const;
  std::vector<int> multi_index(std::size_t flat) const;
};

struct LocalTimeField {
  Box box;
  BinLattice lattice;
  std::vector<double> values;    // L estimate per bin
  std::vector<double> mass;      // time mass per bin
  double bin_volume = 0.0;
  std::vector<double> grid_spacing;
  double time_mass = 0.0;        // lambda_N of the grid cells inside the box
  double overflow_mass = 0.0;

  // sum values * bin_volume + overflow, to be compared with time_mass.
  double recovered_mass() const;
};

// Time mass of every grid node: product of per-axis cell widths, zero for
// nodes outside T or with zero width.
std::vector<double> time_weights(const Grid& g, const Box& T);

LocalTimeField occupation_histogram(const FieldSample& sample, const Box& T, const LatticeSpec& spec);

// Riemann sum of (k / 2 pi)^{d/2} exp(-k |B(t) - x|^2 / 2) over the grid cells in T.
double kernel_local_time(const FieldSample& sample, const Box& T, const std::vector<double>& x, double k);

struct ConstantOne {};
struct BinIndicator {
  std::vector<int> bin;  // multi-index into the histogram lattice
};
struct GaussianBump {
  std::vector<double> center;
  double scale = 1.0;
};
// prod_c P(x_c) on [lo, hi]^d, zero outside.
struct ClippedPolynomial {
  std::vector<double> coeffs;  // ascending powers
  double lo = -1.0;
  double hi = 1.0;
};
using TestFunction = std::variant<ConstantOne, BinIndicator, GaussianBump, ClippedPolynomial>;

struct OccupationPair {
  double direct = 0.0;
  double via_density = 0.0;
};

OccupationPair occupation_check(const FieldSample& sample, const Box& T, const LocalTimeField& ltf,
                                const TestFunction& f);

struct MaxLocalTime {
  double value = 0.0;
  std::size_t argmax = 0;
  std::vector<double> center;
};

MaxLocalTime max_local_time(const LocalTimeField& ltf);

struct RangeBound {
  double time_mass = 0.0;
  double l_star = 0.0;
  double padded_range_volume = 0.0;  // prod_c (range_c + 2 w)
  bool holds = true;
};

// lambda_N(T) <= L*(T) * prod_c (range of B_c over T + 2 bin widths).
RangeBound range_bound_check(const FieldSample& sample, const LocalTimeField& ltf);

// Grid-local estimate of L(x, region): time mass of cells in the region whose
// value falls in the cube of side w centred on x, divided by w^d.
double local_time_box(const FieldSample& sample, const Box& T, const std::vector<double>& x, double w);
double local_time_ball(const FieldSample& sample, const Point& center, double r,
                       const std::vector<double>& x, double w);

std::vector<Point> level_set_points(const FieldSample& sample, const std::vector<double>& x, double tol);

struct BoxCount {
  std::vector<double> sizes;   // box side lengths (time units)
  std::vector<double> counts;  // boxes meeting the level set
  double dimension = 0.0;
  double stderr_ = 0.0;
};

// Boxes of 2^j x ... x 2^j grid intervals, j in `levels`. A box meets the level
// set when every channel's min <= x_c <= max over the box's nodes. Requires a
// grid whose nodes are evenly spaced per axis.
BoxCount box_counting(const FieldSample& sample, const std::vector<double>& x, const std::vector<int>& levels);

struct OscillationRecord {
  Point center;              // snapped to the nearest grid node
  std::vector<double> radii;
  std::vector<double> sup_osc;
};

OscillationRecord oscillation_stats(const FieldSample& sample, const Point& s, const std::vector<double>& radii);

// Cell size satisfying the resolution coupling dt^{H_1} <= w / 4.
double coupled_spacing(double h1, double bin_width);

}  // namespace fbs
