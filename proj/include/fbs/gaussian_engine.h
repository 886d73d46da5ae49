#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fbs/field_model.h"
#include "fbs/grid.h"
#include "fbs/random.h"
#include "fbs/verdict.h"

namespace fbs {

Eigen::MatrixXd assemble_cov(const std::vector<Point>& points, const CovModel& model,
                             const HurstVector& H);

struct Factor {
  Eigen::MatrixXd L;       // lower triangular
  double jitter = 0.0;     // relative diagonal jitter that was needed
};

// Cholesky with relative diagonal jitter 1e-12, 1e-10, 1e-8 on failure.
Factor factorize(const Eigen::MatrixXd& cov);

// Per-axis covariance of the one-parameter fractional Brownian motion with index h.
Eigen::MatrixXd fbm_axis_cov(const std::vector<double>& coords, double h);

struct FieldSample {
  Grid grid;
  HurstVector hurst;
  int d = 1;
  SeedSpec seed;
  std::vector<double> values;  // channel-major: values[c * grid.size() + i]
  double jitter = 0.0;

  double at(int channel, std::size_t i) const { return values[channel * grid.size() + i]; }
  // Field vector at grid node i.
  std::vector<double> vec(std::size_t i) const;
};

// Exact sampler on a tensor grid. The covariance is the Kronecker product of
// per-axis matrices, so its Cholesky factor is the Kronecker product of the
// per-axis factors and a sample costs O(size * sum m_l).
class FieldSampler {
 public:
  FieldSampler(Grid grid, HurstVector H, int d);

  FieldSample sample(const SeedSpec& seed) const;
  // Apply the factor to caller-supplied deviates (row-major, one channel).
  void apply(std::vector<double>& z) const;

  const Grid& grid() const { return grid_; }
  double jitter() const { return jitter_; }

 private:
  Grid grid_;
  HurstVector H_;
  int d_;
  std::vector<Eigen::MatrixXd> factors_;
  double jitter_ = 0.0;
};

// Dense-Cholesky sampler for arbitrary point sets.
class DenseSampler {
 public:
  DenseSampler(const std::vector<Point>& points, const HurstVector& H);
  void apply(std::vector<double>& z) const;
  std::vector<double> sample(const SeedSpec& seed, std::uint32_t channel) const;
  double jitter() const { return factor_.jitter; }

 private:
  Factor factor_;
};

FieldSample sample_field(const Grid& grid, const HurstVector& H, int d, const SeedSpec& seed);

double conditional_variance(int target, const std::vector<Point>& points, const CovModel& model,
                            const HurstVector& H);
// Same, on an already assembled covariance matrix.
double conditional_variance(int target, const Eigen::MatrixXd& cov);

struct DetPair {
  double det_chol = 0.0;
  double det_seq = 0.0;
};

DetPair det_cov_dual(const std::vector<Point>& points, const CovModel& model, const HurstVector& H);
DetPair det_cov_dual(const Eigen::MatrixXd& cov);

struct SectorialRatio {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

SectorialRatio sectorial_ratio(const std::vector<Point>& points, const HurstVector& H);

struct DominationReport {
  double var_sheet = 0.0;       // Var(sum u_j B(t^j))
  double var_liouville = 0.0;   // Var(sum u_j X(t^j))
  double var_slabs = 0.0;       // sum_l Var(sum u_j Y_l(t^j))
  double kappa_sq = 1.0;
  Verdict liouville;            // sheet >= liouville / kappa^2
  Verdict slabs;                // sheet >= slabs / kappa^2
  bool pass() const { return liouville.pass && slabs.pass; }
};

// `kap` may be supplied to avoid recomputing the normalization per call.
DominationReport variance_domination_check(const std::vector<Point>& points,
                                           const std::vector<double>& weights, const HurstVector& H,
                                           double eps, double tol, const KappaValue* kap = nullptr);

struct DetHolderReport {
  double log_lhs = 0.0;   // -1/2 log det Cov(B)
  double log_rhs0 = 0.0;  // sum_l -1/(2 p_l) log det Cov(Y_l), constant excluded
  double c_min = 0.0;     // smallest constant making the inequality hold
  std::vector<int> axes;  // stored-order axes paired with p
  bool pass = true;       // for the supplied constant
};

// Uses the k axes with the smallest indices (ascending H) for p_1..p_k.
DetHolderReport det_holder_check(const std::vector<Point>& points, const HurstVector& H,
                                 const std::vector<double>& p, double eps, double c_supplied,
                                 double tol);

}  // namespace fbs
