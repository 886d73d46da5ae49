#include "fbs/gaussian_engine.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "fbs/errors.h"

namespace fbs {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_distinct_coords(const std::vector<Point>& points) {
  if (points.empty()) return;
  const std::size_t n = points[0].size();
  for (std::size_t l = 0; l < n; ++l) {
    std::vector<double> c;
    c.reserve(points.size());
    for (const auto& p : points) c.push_back(p[l]);
    std::sort(c.begin(), c.end());
    if (std::adjacent_find(c.begin(), c.end()) != c.end()) {
      throw DegenerateInputError("coordinates on axis " + std::to_string(l + 1) +
                                 " are not pairwise distinct");
    }
  }
}

double quad_form(const Eigen::MatrixXd& m, const Eigen::VectorXd& u) { return u.dot(m * u); }

double abs_quad_form(const Eigen::MatrixXd& m, const Eigen::VectorXd& u) {
  const Eigen::VectorXd a = u.cwiseAbs();
  return a.dot(m.cwiseAbs() * a);
}

double log_det_pd(const Eigen::MatrixXd& cov, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw DegenerateInputError(std::string(what) + " is not positive definite");
  double s = 0.0;
  const Eigen::MatrixXd& L = llt.matrixLLT();
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    if (!(L(i, i) > 0.0)) throw DegenerateInputError(std::string(what) + " is singular");
    s += 2.0 * std::log(L(i, i));
  }
  return s;
}

}  // namespace

Eigen::MatrixXd assemble_cov(const std::vector<Point>& points, const CovModel& model,
                             const HurstVector& H) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      c(i, j) = model_cov(model, points[i], points[j], H);
      c(j, i) = c(i, j);
    }
  }
  return c;
}

Factor factorize(const Eigen::MatrixXd& cov) {
  Factor f;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    f.L = llt.matrixL();
    return f;
  }
  const double scale = cov.diagonal().mean();
  for (double rel : {1e-12, 1e-10, 1e-8}) {
    Eigen::MatrixXd j = cov;
    j.diagonal().array() += rel * scale;
    llt.compute(j);
    if (llt.info() == Eigen::Success) {
      f.L = llt.matrixL();
      f.jitter = rel;
      return f;
    }
  }
  throw NumericalError("covariance not positive definite after jitter 1e-8", 1e-8);
}

Eigen::MatrixXd fbm_axis_cov(const std::vector<double>& coords, double h) {
  const auto m = static_cast<Eigen::Index>(coords.size());
  Eigen::MatrixXd c(m, m);
  const double e = 2.0 * h;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      c(i, j) = 0.5 * (std::pow(coords[i], e) + std::pow(coords[j], e) -
                       std::pow(std::fabs(coords[i] - coords[j]), e));
      c(j, i) = c(i, j);
    }
  }
  return c;
}

std::vector<double> FieldSample::vec(std::size_t i) const {
  std::vector<double> v(d);
  for (int c = 0; c < d; ++c) v[c] = at(c, i);
  return v;
}

FieldSampler::FieldSampler(Grid grid, HurstVector H, int d) : grid_(std::move(grid)), H_(std::move(H)), d_(d) {
  if (grid_.n_axes() != H_.n_axes) throw ArityError("sampler: grid and index dimensions differ");
  if (d_ < 1) throw DomainError("sampler: d must be >= 1");
  for (int l = 0; l < H_.n_axes; ++l) {
    Factor f = factorize(fbm_axis_cov(grid_.axis(l), H_.h[l]));
    jitter_ = std::max(jitter_, f.jitter);
    factors_.push_back(std::move(f.L));
  }
}

void FieldSampler::apply(std::vector<double>& z) const {
  if (z.size() != grid_.size()) throw ArityError("sampler: deviate count");
  const auto shape = grid_.shape();
  std::size_t pre = 1;
  std::size_t post = grid_.size();
  RowMat tmp;
  for (std::size_t l = 0; l < shape.size(); ++l) {
    const std::size_t m = shape[l];
    post /= m;
    const auto& L = factors_[l];
    for (std::size_t b = 0; b < pre; ++b) {
      Eigen::Map<RowMat> slab(z.data() + b * m * post, static_cast<Eigen::Index>(m),
                              static_cast<Eigen::Index>(post));
      tmp.noalias() = L.triangularView<Eigen::Lower>() * slab;
      slab = tmp;
    }
    pre *= m;
  }
}

FieldSample FieldSampler::sample(const SeedSpec& seed) const {
  FieldSample s;
  s.grid = grid_;
  s.hurst = H_;
  s.d = d_;
  s.seed = seed;
  s.jitter = jitter_;
  const std::size_t n = grid_.size();
  s.values.resize(n * d_);
  std::vector<double> z(n);
  for (int c = 0; c < d_; ++c) {
    NormalStream(seed, static_cast<std::uint32_t>(c)).fill(z);
    apply(z);
    std::copy(z.begin(), z.end(), s.values.begin() + static_cast<std::ptrdiff_t>(c * n));
  }
  return s;
}

DenseSampler::DenseSampler(const std::vector<Point>& points, const HurstVector& H)
    : factor_(factorize(assemble_cov(points, CovModel::full_sheet(), H))) {}

void DenseSampler::apply(std::vector<double>& z) const {
  if (static_cast<Eigen::Index>(z.size()) != factor_.L.rows()) throw ArityError("dense sampler: deviate count");
  Eigen::Map<Eigen::VectorXd> v(z.data(), static_cast<Eigen::Index>(z.size()));
  v = factor_.L.triangularView<Eigen::Lower>() * v;
}

std::vector<double> DenseSampler::sample(const SeedSpec& seed, std::uint32_t channel) const {
  std::vector<double> z(static_cast<std::size_t>(factor_.L.rows()));
  NormalStream(seed, channel).fill(z);
  apply(z);
  return z;
}

FieldSample sample_field(const Grid& grid, const HurstVector& H, int d, const SeedSpec& seed) {
  return FieldSampler(grid, H, d).sample(seed);
}

double conditional_variance(int target, const Eigen::MatrixXd& cov) {
  const auto n = cov.rows();
  if (target < 0 || target >= n) throw DomainError("conditional variance: target index out of range");
  const double vtt = cov(target, target);
  if (n == 1) return vtt;
  std::vector<Eigen::Index> others;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i != target) others.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(others.size());
  Eigen::MatrixXd soo(m, m);
  Eigen::VectorXd sot(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    sot(i) = cov(others[i], target);
    for (Eigen::Index j = 0; j < m; ++j) soo(i, j) = cov(others[i], others[j]);
  }
  const Factor f = factorize(soo);
  const Eigen::VectorXd v = f.L.triangularView<Eigen::Lower>().solve(sot);
  const double cv = vtt - v.squaredNorm();
  if (cv < -1e-10 * std::max(vtt, 1e-300)) {
    throw NumericalError("conditional variance negative beyond tolerance", -cv);
  }
  return std::max(cv, 0.0);
}

double conditional_variance(int target, const std::vector<Point>& points, const CovModel& model,
                            const HurstVector& H) {
  if (points.empty()) throw ArityError("conditional variance: no points");
  return conditional_variance(target, assemble_cov(points, model, H));
}

DetPair det_cov_dual(const Eigen::MatrixXd& cov) {
  DetPair out;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericalError("det_cov_dual: matrix is not positive definite", 0.0);
  const Eigen::MatrixXd& L = llt.matrixLLT();
  out.det_chol = 1.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) out.det_chol *= L(i, i) * L(i, i);

  // Sequential conditioning, each prefix solved independently by full-pivot LU.
  out.det_seq = cov(0, 0);
  for (Eigen::Index j = 1; j < cov.rows(); ++j) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(cov.topLeftCorner(j, j));
    const Eigen::VectorXd b = cov.block(0, j, j, 1);
    const Eigen::VectorXd x = lu.solve(b);
    out.det_seq *= cov(j, j) - b.dot(x);
  }
  if (!(out.det_chol > 0.0) || !(out.det_seq > 0.0)) {
    throw NumericalError("det_cov_dual: nonpositive determinant", 0.0);
  }
  return out;
}

DetPair det_cov_dual(const std::vector<Point>& points, const CovModel& model, const HurstVector& H) {
  if (points.empty()) throw ArityError("det_cov_dual: no points");
  require_distinct_coords(points);
  return det_cov_dual(assemble_cov(points, model, H));
}

SectorialRatio sectorial_ratio(const std::vector<Point>& points, const HurstVector& H) {
  if (points.empty()) throw ArityError("sectorial ratio: no points");
  const auto n = points.size();
  const Point& tn = points.back();
  SectorialRatio out;
  for (int l = 0; l < H.n_axes; ++l) {
    double gap = tn[l];  // the origin convention t^0 = 0
    for (std::size_t j = 0; j + 1 < n; ++j) gap = std::min(gap, std::fabs(tn[l] - points[j][l]));
    out.rhs += std::pow(gap, 2.0 * H.h[l]);
  }
  if (!(out.rhs > 0.0)) throw DegenerateInputError("sectorial ratio: target coincides with a conditioning coordinate on every axis");
  out.lhs = conditional_variance(static_cast<int>(n - 1), points, CovModel::full_sheet(), H);
  out.ratio = out.lhs / out.rhs;
  return out;
}

DominationReport variance_domination_check(const std::vector<Point>& points,
                                           const std::vector<double>& weights, const HurstVector& H,
                                           double eps, double tol, const KappaValue* kap) {
  if (points.size() != weights.size()) throw ArityError("domination: weights and points differ in length");
  const auto n = static_cast<Eigen::Index>(points.size());
  const KappaValue k = kap ? *kap : kappa(H, tol);
  DominationReport r;
  r.kappa_sq = k.value * k.value;
  const double kappa_rel = 2.0 * k.quad_error / k.value;

  Eigen::VectorXd u(n);
  for (Eigen::Index i = 0; i < n; ++i) u(i) = weights[i];

  const Eigen::MatrixXd sb = assemble_cov(points, CovModel::full_sheet(), H);
  const Eigen::MatrixXd sx = assemble_cov(points, CovModel::liouville(tol), H);
  std::vector<Eigen::MatrixXd> sy(H.n_axes, Eigen::MatrixXd::Zero(n, n));
  double comp_err = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const ComponentCovs c = all_components(eps, points[i], points[j], H, tol);
      for (int l = 0; l < H.n_axes; ++l) {
        sy[l](i, j) = sy[l](j, i) = c.slab[l];
      }
      comp_err += (i == j ? 1.0 : 2.0) * std::fabs(u(i) * u(j)) * c.quad_error;
    }
  }

  r.var_sheet = quad_form(sb, u);
  r.var_liouville = quad_form(sx, u);
  Eigen::MatrixXd sy_abs = Eigen::MatrixXd::Zero(n, n);
  for (const auto& m : sy) {
    r.var_slabs += quad_form(m, u);
    sy_abs += m;
  }

  auto fill = [&](Verdict& v, const char* id, const char* ref, double rhs_raw, double quad_err) {
    v.check_id = id;
    v.reference = ref;
    v.lhs = r.var_sheet;
    v.rhs = rhs_raw / r.kappa_sq;
    v.slack = v.lhs - v.rhs;
    v.tolerance = 1e-9 * std::max({std::fabs(v.lhs), std::fabs(v.rhs), 1.0}) +
                  (quad_err + kappa_rel * std::fabs(rhs_raw)) / r.kappa_sq;
    v.pass = v.slack >= -v.tolerance;
  };
  const double qx = H.n_axes * tol * abs_quad_form(sx, u);
  fill(r.liouville, "sheet_dominates_liouville",
       "variance of a linear combination of the sheet dominates the Liouville sheet over kappa^2",
       r.var_liouville, qx);
  fill(r.slabs, "sheet_dominates_slabs",
       "variance of a linear combination of the sheet dominates the summed slab variances over kappa^2",
       r.var_slabs, comp_err + H.n_axes * tol * abs_quad_form(sy_abs, u));
  return r;
}

DetHolderReport det_holder_check(const std::vector<Point>& points, const HurstVector& H,
                                 const std::vector<double>& p, double eps, double c_supplied,
                                 double tol) {
  const int k = static_cast<int>(p.size());
  if (k < 1 || k > H.n_axes) throw DomainError("det holder: need 1 <= k <= N exponents");
  double inv_sum = 0.0;
  for (double x : p) {
    if (!(x >= 1.0 - 1e-12)) throw DomainError("det holder: every p_l must be >= 1");
    inv_sum += 1.0 / x;
  }
  if (std::fabs(inv_sum - 1.0) > 1e-12) throw DomainError("det holder: sum of 1/p_l must equal 1");
  if (points.empty()) throw ArityError("det holder: no points");
  require_distinct_coords(points);

  DetHolderReport r;
  const auto n = static_cast<double>(points.size());
  r.log_lhs = -0.5 * log_det_pd(assemble_cov(points, CovModel::full_sheet(), H), "sheet covariance");
  for (int j = 0; j < k; ++j) {
    const int axis = H.sort_perm[j];
    r.axes.push_back(axis);
    const Eigen::MatrixXd sy =
        assemble_cov(points, CovModel::component(RegionComponent::slab(axis, eps), tol), H);
    r.log_rhs0 += -log_det_pd(sy, "slab covariance") / (2.0 * p[j]);
  }
  const double log_c = (r.log_lhs - r.log_rhs0) / (n * k);
  r.c_min = std::exp(log_c);
  r.pass = c_supplied > 0.0 && std::log(c_supplied) >= log_c - tol;
  return r;
}

}  // namespace fbs
