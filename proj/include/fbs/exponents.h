#pragma once

#include <cstdint>
#include <vector>

#include "fbs/hurst.h"

namespace fbs {

// Every function here works on the ascending view of H; axis numbers in the
// results (ell0, p order) refer to that view.

// Unique tau with sum_{l<tau} 1/H_l <= q < sum_{l<=tau} 1/H_l.
int tau_index(const HurstVector& H, double q);

struct HolderWeights {
  std::vector<double> p;      // p_1..p_tau
  std::vector<double> eps;    // 1 - H_l q / p_l
  double delta = 0.0;
  double delta_tau = 1.0;
  int ell0 = 1;               // one-based
  double rho = 0.0;
  double eta = 0.0;           // top-level free parameter (0 when not used)
  double alpha = 0.0;         // alpha_tau
  int tau = 1;
};

// Threshold delta_tau below which construct_weights accepts delta.
double delta_threshold(const HurstVector& H, double q);

// rho < 0 selects the default alpha_tau / (4 tau).
HolderWeights construct_weights(const HurstVector& H, double q, double delta, double rho = -1.0);

struct ExponentProfile {
  int tau = 1;
  double beta_tau = 0.0;
  double alpha_tau = 0.0;
  double nu = 0.0;
  double dim_level_set = 0.0;
  double q = 0.0;
  std::vector<double> candidates;  // the N dimension candidates, k = 1..N
};

ExponentProfile beta_and_dim(const HurstVector& H, int d);

class GaugeFunction {
 public:
  enum class Kind { phi1, lil_g };

  // r^beta (log log 1/r)^{N - beta}
  static GaugeFunction phi1(double beta_tau, int n_axes);
  // r^{N - H_1 d} (log log 1/r)^{H_1 d}
  static GaugeFunction lil_g(double h1, int n_axes, int d);

  Kind kind() const { return kind_; }
  double power() const { return power_; }
  double log_power() const { return log_power_; }
  // Upper end of the admissible range: log log 1/r >= 1 and the function is increasing.
  double r_max() const;
  double operator()(double r) const;

 private:
  GaugeFunction(Kind k, double power, double log_power) : kind_(k), power_(power), log_power_(log_power) {}
  Kind kind_;
  double power_;
  double log_power_;
};

struct DirichletResult {
  double lhs = 0.0;
  double lhs_error = 0.0;   // quadrature error or Monte Carlo standard error
  double rhs_exact = 0.0;
  double rhs_exact_error = 0.0;
  double rhs_bound = 0.0;   // with the supplied constant
  bool monte_carlo = false;
};

// Ordered-simplex integral of prod_j (s_j - s_{j-1})^{-alpha} over
// a <= s_1 <= ... <= s_n <= a + r, against its Beta-function reduction and the
// power-law bound c^n (n!)^{alpha - 1} r^{n(1 - (1 - 1/n) alpha)}.
DirichletResult dirichlet_integral(int n, double a, double r, double s0, double alpha,
                                   double c32 = 1.0, double tol = 1e-10,
                                   std::uint64_t mc_seed = 1, int mc_samples = 200000);

// Bound without the constant: (n!)^{alpha - 1} r^{n(1 - (1 - 1/n) alpha)}.
double dirichlet_bound_shape(int n, double r, double alpha);

struct DirichletInput {
  int n;
  double a, r, s0, alpha;
};

// Smallest c making lhs <= c^n * shape on every input.
double calibrate_c32(const std::vector<DirichletInput>& inputs, double tol = 1e-10);

}  // namespace fbs
