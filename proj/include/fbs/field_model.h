#pragma once

#include <string>
#include <vector>

#include "fbs/hurst.h"

namespace fbs {

// Covariance of the fractional Brownian sheet: product over axes of
// (s^{2H} + t^{2H} - |s - t|^{2H}) / 2.
double fbs_cov(const Point& s, const Point& t, const HurstVector& H);

// Moving-average kernel ((t - s)_+)^{h - 1/2} - ((-s)_+)^{h - 1/2}.
// At h == 0.5 exactly this is the indicator of [0, t) evaluated at s.
double kernel_g(double h, double t, double s);

struct KappaValue {
  double value = 1.0;
  std::vector<double> per_axis;  // stored axis order
  double quad_error = 0.0;       // absolute error on value
};

KappaValue kappa(const HurstVector& H, double tol);

// Squared per-axis factor of kappa for a single index.
double kappa_axis_squared(double h, double tol, double* err = nullptr);

double liouville_cov(const Point& s, const Point& t, const HurstVector& H, double tol);

struct RegionComponent {
  enum class Kind { corner, slab, remainder, full };
  Kind kind = Kind::full;
  int axis = 0;         // zero-based, slab only
  double epsilon = 0.0;

  static RegionComponent corner(double eps) { return {Kind::corner, 0, eps}; }
  static RegionComponent slab(int axis, double eps) { return {Kind::slab, axis, eps}; }
  static RegionComponent remainder(double eps) { return {Kind::remainder, 0, eps}; }
  static RegionComponent full() { return {Kind::full, 0, 0.0}; }
};

std::string to_string(RegionComponent::Kind kind);

double component_cov(const RegionComponent& region, const Point& s, const Point& t,
                     const HurstVector& H, double tol);

// All components of the decomposition from one set of per-axis integrals.
struct ComponentCovs {
  double corner = 0.0;
  std::vector<double> slab;  // per stored axis
  double remainder = 0.0;
  double quad_error = 0.0;   // absolute, summed over per-axis pieces
};

ComponentCovs all_components(double eps, const Point& s, const Point& t, const HurstVector& H,
                             double tol);

// Closed-form evaluation of the slab increment integral: the variance carried by
// the part of the slab R_axis(t_n) with r_axis in (t_prev, t_n[axis]].
double slab_lower_bound(int axis, double eps, const Point& t_n, double t_prev,
                        const HurstVector& H);

struct PartitionBox {
  Box box;
  RegionComponent::Kind kind;
  int axis = -1;  // slab axis, -1 otherwise
};

std::vector<PartitionBox> partition_boxes(double eps, const Point& t);

// Which kernel a Gaussian vector is built from.
struct CovModel {
  enum class Kind { full_sheet, liouville, component };
  Kind kind = Kind::full_sheet;
  RegionComponent region;
  double tol = 1e-10;

  static CovModel full_sheet() { return {}; }
  static CovModel liouville(double tol) { return {Kind::liouville, {}, tol}; }
  static CovModel component(const RegionComponent& r, double tol) { return {Kind::component, r, tol}; }
};

double model_cov(const CovModel& model, const Point& s, const Point& t, const HurstVector& H);

// Default decomposition width: half of the smallest lower coordinate.
double default_epsilon(const Box& interval);

}  // namespace fbs
