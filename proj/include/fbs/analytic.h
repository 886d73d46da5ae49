#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fbs/field_model.h"
#include "fbs/gaussian_engine.h"
#include "fbs/hurst.h"
#include "fbs/regression.h"
#include "fbs/verdict.h"

namespace fbs {

struct MomentOptions {
  double tol = 1e-8;
  std::optional<Point> anchor;  // moments of L(x + B(a), T) when set
  double tube = -1.0;           // fixed diagonal-tube width; < 0 picks one automatically
  int mc_samples = 200000;
  std::uint64_t seed = 1;
};

struct MomentReport {
  int n = 1;
  std::vector<double> x;
  Box box;
  double value = 0.0;
  double quad_error = 0.0;       // quadrature error or Monte Carlo standard error
  std::string method;            // "quadrature" or "monte-carlo"
  double tube = 0.0;             // diagonal exclusion width (n >= 2 quadrature)
  double truncated = 0.0;        // integral outside the tube
  double excluded_mass = 0.0;    // local power-law estimate of the tube's share
  double local_power = 0.0;      // fitted blow-up exponent of the integrand at the diagonal
  bool converged = true;         // false when the excluded mass cannot be bounded
};

// E[L(x, T)^n] for n <= 3 with N * n <= 6.
MomentReport exact_moment(const std::vector<double>& x, const Box& T, const HurstVector& H, int n,
                          const MomentOptions& opt = {});

// Exact expectation of the grid estimator local_time_box(sample, T, x, w) for
// a sample on `grid`: sum over nodes of time mass * P(B(t) in the w-cube at x) / w^d.
// Its distance from exact_moment is the discretization bias of the estimator.
double histogram_expectation(const Grid& grid, const Box& T, const HurstVector& H,
                             const std::vector<double>& x, double w);

struct ScalingFit {
  std::vector<double> radii;
  std::vector<double> moments;
  std::vector<double> moment_se;
  FitResult fit;
};

// n = 1 exact path: moments from exact_moment on T = [a, a + r].
ScalingFit moment_scaling_exact(const std::vector<double>& x, const Point& a, const HurstVector& H,
                                const std::vector<double>& radii, bool anchored, double tol);

struct ScalingMcOptions {
  int cells = 128;              // per axis on [a, a + max radius]
  double bin_width = 0.02;
  int replicas = 1000;
  bool anchored = true;
  SeedSpec seed{};
  int workers = 1;
};

// Monte Carlo path: n-th moment of the histogram local time on nested cubes.
ScalingFit moment_scaling_mc(const std::vector<double>& x, const Point& a, const HurstVector& H, int n,
                             const std::vector<double>& radii, const ScalingMcOptions& opt);

struct IncrementMoment {
  double value = 0.0;
  double error = 0.0;
  double bound_rhs = 0.0;
  std::string method;
};

// E[(L(x,T) - L(y,T))^2] for a cube T, against the power bound with constant c.
IncrementMoment increment_moment_two(const std::vector<double>& x, const std::vector<double>& y,
                                     const Box& T, const HurstVector& H, double gamma, double c,
                                     const MomentOptions& opt = {});

struct CuzickPair {
  double lhs = 0.0;
  double rhs = 0.0;
  double lhs_error = 0.0;
  double rhs_error = 0.0;
};

// n <= 2 points; g(v) = |v|^gamma applied to the first coordinate.
CuzickPair cuzick_identity_check(const std::vector<Point>& points, const CovModel& model,
                                 const HurstVector& H, double gamma, double tol = 1e-10);
CuzickPair cuzick_identity_check(const Eigen::MatrixXd& cov, double gamma, double tol = 1e-10);

struct TailReport {
  std::vector<double> u;
  std::vector<double> frequency;
  std::vector<bool> applicable;  // u above the fitted c48 h^{H_1}
  double c48 = 0.0;
  double c49 = 0.0;
  double tail_slope = 0.0;       // slope of log(-log p) against log u on the applicable region
  double median_sup = 0.0;
  bool monotone = true;
};

struct TailOptions {
  int cells = 64;   // intervals per axis on [s, s + h]
  int replicas = 2000;
  SeedSpec seed{};
  int workers = 1;
};

TailReport tail_bound_check(const HurstVector& H, const Point& s, double h, const std::vector<double>& u_grid,
                            const TailOptions& opt);

}  // namespace fbs
