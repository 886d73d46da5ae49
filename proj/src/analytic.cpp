#include "fbs/analytic.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "fbs/errors.h"
#include "fbs/exponents.h"
#include "fbs/local_time.h"
#include "fbs/parallel.h"
#include "fbs/quadrature.h"

namespace fbs {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Covariance of B(t), or with an anchor of B(a + u) - B(a) where the arguments
// are the offsets u = t - a. The anchored form expands each increment into
// rectangular increments over nonempty axis subsets, so no O(1) terms cancel
// near the anchor, and taking offsets keeps their relative precision.
struct Kernel {
  const HurstVector& H;
  const std::optional<Point>& a;
  double operator()(const Point& s, const Point& t) const {
    if (!a) return fbs_cov(s, t, H);
    const int n = H.n_axes;
    // per axis: ii = Cov(dX(s), dX(t)), is = Cov(dX(s), X(a)), it = Cov(X(a), dX(t)), bb = Var X(a)
    double ii[8], is[8], it[8], bb[8];
    for (int l = 0; l < n; ++l) {
      const double e = 2.0 * H.h[l];
      const double al = (*a)[l];
      const double ds = std::pow(std::fabs(s[l]), e);
      const double dt = std::pow(std::fabs(t[l]), e);
      auto pow_diff = [&](double u) { return std::pow(al, e) * std::expm1(e * std::log1p(u / al)); };
      ii[l] = 0.5 * (ds + dt - std::pow(std::fabs(s[l] - t[l]), e));
      is[l] = 0.5 * (pow_diff(s[l]) - ds);
      it[l] = 0.5 * (pow_diff(t[l]) - dt);
      bb[l] = std::pow(al, e);
    }
    double k = 0.0;
    const unsigned full = 1u << n;
    for (unsigned S = 1; S < full; ++S) {
      for (unsigned T = 1; T < full; ++T) {
        double p = 1.0;
        for (int l = 0; l < n; ++l) {
          const bool in_s = S >> l & 1u, in_t = T >> l & 1u;
          p *= in_s ? (in_t ? ii[l] : is[l]) : (in_t ? it[l] : bb[l]);
        }
        k += p;
      }
    }
    return k;
  }
};

// The box in the kernel's coordinates: offsets from the anchor when there is one.
Box kernel_box(const Box& T, const std::optional<Point>& a) {
  if (!a) return T;
  Box u = T;
  for (std::size_t l = 0; l < T.dim(); ++l) {
    u.lower[l] -= (*a)[l];
    u.upper[l] -= (*a)[l];
  }
  return u;
}

// Product over channels of the centred Gaussian density with covariance g,
// evaluated at z[c] (an n-vector per channel). Zero off the positive-definite cone.
double density(const Eigen::MatrixXd& g, const std::vector<Eigen::VectorXd>& z) {
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) return 0.0;
  const Eigen::MatrixXd& L = llt.matrixLLT();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    if (!(L(i, i) > 0.0)) return 0.0;
    log_det += 2.0 * std::log(L(i, i));
  }
  const auto n = static_cast<double>(g.rows());
  double expo = 0.0;
  for (const auto& zc : z) {
    const Eigen::VectorXd w = llt.matrixL().solve(zc);
    expo += w.squaredNorm();
  }
  const double d = static_cast<double>(z.size());
  return std::exp(-0.5 * d * (n * std::log(kTwoPi) + log_det) - 0.5 * expo);
}

std::vector<Eigen::VectorXd> same_level(const std::vector<double>& x, int n) {
  std::vector<Eigen::VectorXd> z;
  for (double xc : x) z.push_back(Eigen::VectorXd::Constant(n, xc));
  return z;
}

// N = 1 pairs in the basis (B(t), B(t + g) - B(t)), t an anchor offset when
// anchored (increments are stationary, so the formula is the same). No entry
// cancels as g -> 0, unlike the plain 2x2 covariance. The change of basis has
// unit Jacobian, so densities carry over with the levels mapped to (z0, z1 - z0).
Eigen::Matrix2d pair_increment_cov(double h, double t, double g) {
  const double e = 2.0 * h;
  const double ge = std::pow(g, e);
  Eigen::Matrix2d c;
  c(0, 0) = std::pow(t, e);
  c(1, 1) = ge;
  c(0, 1) = c(1, 0) = 0.5 * (c(0, 0) * std::expm1(e * std::log1p(g / t)) - ge);
  return c;
}

std::vector<Eigen::VectorXd> increment_levels(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<Eigen::VectorXd> z;
  for (std::size_t c = 0; c < a.size(); ++c) z.push_back(Eigen::Vector2d(a[c], b[c] - a[c]));
  return z;
}

void check_anchor(const std::optional<Point>& a, const Box& T) {
  if (!a) return;
  if (a->size() != T.dim()) throw ArityError("moment: anchor arity");
  if (a->size() > 3) throw DomainError("moment: anchored moments support N <= 3");
  for (double x : *a) {
    if (!(x > 0.0)) throw DomainError("moment: anchor must be in the open quadrant");
  }
  for (std::size_t l = 0; l < T.dim(); ++l) {
    if ((*a)[l] > T.lower[l] && (*a)[l] < T.upper[l]) {
      throw DomainError("moment: anchor must be the lower corner or lie outside the box");
    }
  }
}

// Axis map t = lo + span * y^k on y in [0, 1]; k > 1 clusters nodes at lo.
struct AxisMap {
  double lo, span, k;
  double t(double y) const { return lo + span * std::pow(y, k); }
  double jac(double y) const { return span * k * std::pow(y, k - 1.0); }
};

// Integral of f over a box of dimension 1 or 2.
QuadResult integrate_box(const std::function<double(const Point&)>& f, const Box& T, double k, double tol) {
  const std::size_t n = T.dim();
  std::vector<AxisMap> m;
  for (std::size_t l = 0; l < n; ++l) m.push_back({T.lower[l], T.upper[l] - T.lower[l], k});
  if (n == 1) {
    return integrate([&](double y) { return f({m[0].t(y)}) * m[0].jac(y); }, 0.0, 1.0, tol);
  }
  if (n != 2) throw DomainError("integrate_box: dimension must be 1 or 2");
  double inner_err = 0.0;
  auto outer = [&](double y0) {
    const double t0 = m[0].t(y0);
    const QuadResult qi = integrate([&](double y1) { return f({t0, m[1].t(y1)}) * m[1].jac(y1); }, 0.0, 1.0, tol);
    inner_err = std::max(inner_err, qi.error * m[0].jac(y0));
    return qi.value * m[0].jac(y0);
  };
  QuadResult q = integrate(outer, 0.0, 1.0, tol);
  q.error += inner_err;
  return q;
}

Point uniform_point(const Box& T, const NormalStream& rng, std::uint64_t& idx) {
  Point p(T.dim());
  for (std::size_t l = 0; l < T.dim(); ++l) p[l] = T.lower[l] + (T.upper[l] - T.lower[l]) * rng.uniform(idx++);
  return p;
}

// Monte Carlo over T^n of integrand(Gamma).
MomentReport mc_moment(const std::function<double(const Eigen::MatrixXd&)>& integrand, const Box& T, int n,
                       const Kernel& K, const MomentOptions& opt) {
  const NormalStream rng(SeedSpec{opt.seed, 0}, 0);
  std::uint64_t idx = 0;
  double sum = 0.0, sum2 = 0.0;
  const double vol = std::pow(T.volume(), n);
  std::vector<Point> pts(n);
  Eigen::MatrixXd g(n, n);
  for (int s = 0; s < opt.mc_samples; ++s) {
    for (int j = 0; j < n; ++j) pts[j] = uniform_point(T, rng, idx);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) g(i, j) = g(j, i) = K(pts[i], pts[j]);
    }
    const double v = integrand(g);
    sum += v;
    sum2 += v * v;
  }
  MomentReport r;
  const double mean = sum / opt.mc_samples;
  const double var = std::max(sum2 / opt.mc_samples - mean * mean, 0.0);
  r.value = vol * mean;
  r.quad_error = vol * std::sqrt(var / opt.mc_samples);
  r.method = "monte-carlo";
  return r;
}

struct TubeResult {
  double truncated = 0.0;
  double trunc_err = 0.0;
  double excluded = 0.0;
  double power = 0.0;
  bool bounded = true;
};

// Two-point integral over an interval, N = 1: 2 * int_{t1 < t2, t2 - t1 >= h} F(t1, t2 - t1).
// Gaps are integrated in log scale; the tube {t2 - t1 < h} is estimated from
// the local power law F ~ C g^{-p} fitted at g = h and h/2.
TubeResult two_point_tube(const std::function<double(double, double)>& F, double lo, double hi, double h,
                          double k, double tol) {
  TubeResult r;
  const double span = hi - lo;
  const AxisMap m{lo, span, k};
  const double y_max = std::pow((span - h) / span, 1.0 / k);
  double inner_err = 0.0;
  auto outer = [&](double y) {
    const double t1 = m.t(y);
    const double top = hi - t1;
    if (!(top > h)) return 0.0;
    const QuadResult qi = integrate(
        [&](double u) {
          const double g = std::exp(u);
          return F(t1, g) * g;
        },
        std::log(h), std::log(top), tol);
    inner_err = std::max(inner_err, qi.error * m.jac(y));
    return qi.value * m.jac(y);
  };
  const QuadResult q = integrate(outer, 0.0, y_max, tol);
  r.truncated = 2.0 * q.value;
  r.trunc_err = 2.0 * (q.error + inner_err);

  double max_p = -INFINITY;
  auto tube = [&](double y) {
    const double t1 = m.t(y);
    const double f1 = F(t1, h);
    const double f2 = F(t1, 0.5 * h);
    if (!(f1 > 0.0) || !(f2 > 0.0)) return 0.0;
    const double p = std::log2(f2 / f1);
    max_p = std::max(max_p, p);
    if (p >= 1.0) return 0.0;
    return f1 * h / (1.0 - p) * m.jac(y);
  };
  const QuadResult qt = integrate(tube, 0.0, y_max, 1e-6);
  r.power = max_p;
  if (max_p >= 1.0) {
    r.bounded = false;
    r.excluded = INFINITY;
  } else {
    r.excluded = 2.0 * qt.value;
  }
  return r;
}

MomentReport tube_moment(const std::function<double(double, double)>& F, const Box& T, double k,
                         const MomentOptions& opt) {
  MomentReport r;
  r.method = "quadrature";
  const double span = T.upper[0] - T.lower[0];
  auto fill = [&](const TubeResult& tr, double h) {
    r.tube = h;
    r.truncated = tr.truncated;
    r.excluded_mass = tr.excluded;
    r.local_power = tr.power;
    r.converged = tr.bounded;
    r.value = tr.bounded ? tr.truncated + tr.excluded : tr.truncated;
    r.quad_error = tr.trunc_err + (tr.bounded ? 0.1 * tr.excluded : INFINITY);
  };
  if (opt.tube > 0.0) {
    fill(two_point_tube(F, T.lower[0], T.upper[0], opt.tube, k, opt.tol), opt.tube);
    return r;
  }
  // Successive tubes are compared; the extrapolated totals settle long before
  // the tube share itself drops below tol when the blow-up is strong.
  double prev = NAN;
  for (double h = 1e-2 * span; h >= 0.99e-6 * span; h *= 0.1) {
    const TubeResult tr = two_point_tube(F, T.lower[0], T.upper[0], h, k, opt.tol);
    if (!tr.bounded) {
      fill(tr, h);
      throw NumericalError("moment: integrand not integrable across the diagonal (local power " +
                               std::to_string(tr.power) + ")",
                           INFINITY);
    }
    fill(tr, h);
    const double total = tr.truncated + tr.excluded;
    if (std::isfinite(prev)) {
      const double change = std::abs(total - prev);
      r.quad_error = tr.trunc_err + change;
      if (change <= opt.tol * total || 0.1 * tr.excluded <= opt.tol * tr.truncated) return r;
    }
    prev = total;
  }
  return r;
}

}  // namespace

MomentReport exact_moment(const std::vector<double>& x, const Box& T, const HurstVector& H, int n,
                          const MomentOptions& opt) {
  validate_box(T, true);
  const int N = H.n_axes;
  const int d = H.ambient_dim;
  if (T.dim() != static_cast<std::size_t>(N)) throw ArityError("moment: box dimension must equal N");
  if (x.size() != static_cast<std::size_t>(d)) throw ArityError("moment: x must have d coordinates");
  if (n < 1 || n > 3 || N * n > 6) throw DomainError("moment: need 1 <= n <= 3 and N * n <= 6");
  check_anchor(opt.anchor, T);
  const Kernel K{H, opt.anchor};
  const Box U = kernel_box(T, opt.anchor);
  const double k = opt.anchor ? 3.0 : 1.0;
  const double x2 = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);

  MomentReport r;
  if (n == 1) {
    auto f1 = [&](const Point& t) {
      const double v = K(t, t);
      // t rounds onto the anchor below one ulp; the mass lost there is negligible.
      if (!(v > 0.0)) return 0.0;
      return std::pow(kTwoPi * v, -0.5 * d) * std::exp(-0.5 * x2 / v);
    };
    if (!opt.anchor && x2 == 0.0) {
      // The variance is a product over axes, so the integral factorizes.
      r.value = std::pow(kTwoPi, -0.5 * d);
      double rel = 0.0;
      for (int l = 0; l < N; ++l) {
        const double e = -H.h[l] * d;
        const QuadResult q = integrate([&](double t) { return std::pow(t, e); }, T.lower[l], T.upper[l], opt.tol);
        r.value *= q.value;
        rel += q.error / q.value;
      }
      r.quad_error = r.value * rel;
      r.method = "quadrature";
    } else if (N <= 2) {
      const QuadResult q = integrate_box(f1, U, k, opt.tol);
      r.value = q.value;
      r.quad_error = q.error;
      r.method = "quadrature";
    } else {
      r = mc_moment([&](const Eigen::MatrixXd& g) { return density(g, same_level(x, 1)); }, U, 1, K, opt);
    }
  } else if (n == 2 && N == 1) {
    const auto z = increment_levels(x, x);
    auto F = [&](double t1, double gap) {
      if (!(t1 > 0.0)) return 0.0;
      return density(pair_increment_cov(H.h[0], t1, gap), z);
    };
    r = tube_moment(F, U, k, opt);
  } else {
    const auto z = same_level(x, n);
    r = mc_moment([&](const Eigen::MatrixXd& g) { return density(g, z); }, U, n, K, opt);
  }
  r.n = n;
  r.x = x;
  r.box = T;
  return r;
}

double histogram_expectation(const Grid& grid, const Box& T, const HurstVector& H,
                             const std::vector<double>& x, double w) {
  if (x.size() != static_cast<std::size_t>(H.ambient_dim)) throw ArityError("expectation: x must have d coordinates");
  if (!(w > 0.0)) throw DomainError("expectation: bin width must be positive");
  const std::vector<double> mass = time_weights(grid, T);
  double acc = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (!(mass[i] > 0.0)) continue;
    const Point t = grid.point(i);
    const double sd = std::sqrt(fbs_cov(t, t, H));
    double p = 1.0;
    for (double xc : x) {
      // P(lo <= Z sd < hi) via erfc, accurate in both tails.
      const double lo = (xc - 0.5 * w) / (sd * std::numbers::sqrt2);
      const double hi = (xc + 0.5 * w) / (sd * std::numbers::sqrt2);
      p *= lo >= 0.0 ? 0.5 * (std::erfc(lo) - std::erfc(hi)) : 0.5 * (std::erfc(-hi) - std::erfc(-lo));
    }
    acc += mass[i] * p;
  }
  return acc / std::pow(w, static_cast<double>(x.size()));
}

ScalingFit moment_scaling_exact(const std::vector<double>& x, const Point& a, const HurstVector& H,
                                const std::vector<double>& radii, bool anchored, double tol) {
  ScalingFit s;
  MomentOptions opt;
  opt.tol = tol;
  if (anchored) opt.anchor = a;
  for (double r : radii) {
    const MomentReport m = exact_moment(x, cube(a, r), H, 1, opt);
    s.radii.push_back(r);
    s.moments.push_back(m.value);
    s.moment_se.push_back(m.quad_error);
  }
  s.fit = fit_exponent(s.radii, s.moments);
  return s;
}

ScalingFit moment_scaling_mc(const std::vector<double>& x, const Point& a, const HurstVector& H, int n,
                             const std::vector<double>& radii, const ScalingMcOptions& opt) {
  if (radii.size() < 3) throw DomainError("scaling: need at least three radii");
  if (opt.replicas < 2) throw DomainError("scaling: need at least two replicas");
  const int N = H.n_axes;
  const double rmax = *std::max_element(radii.begin(), radii.end());
  const double step = rmax / opt.cells;
  for (double r : radii) {
    const double c = r / step;
    if (std::fabs(c - std::round(c)) > 1e-9 * c || std::round(c) < 1.0) {
      throw DomainError("scaling: every radius must be a whole number of cells");
    }
  }
  const Grid grid = Grid::midpoint(cube(a, rmax), std::vector<int>(N, opt.cells), opt.anchored);
  const FieldSampler sampler(grid, H, H.ambient_dim);
  const std::size_t R = radii.size();
  std::vector<double> vals(static_cast<std::size_t>(opt.replicas) * R);
  parallel_for(static_cast<std::size_t>(opt.replicas), opt.workers, [&](std::size_t i) {
    const FieldSample s = sampler.sample(SeedSpec{opt.seed.master_seed, opt.seed.stream_id + i});
    std::vector<double> level = x;
    if (opt.anchored) {
      for (int c = 0; c < s.d; ++c) level[c] += s.at(c, 0);  // node 0 is the anchor a
    }
    for (std::size_t k = 0; k < R; ++k) {
      const double l = local_time_box(s, cube(a, radii[k]), level, opt.bin_width);
      vals[i * R + k] = std::pow(l, n);
    }
  });
  ScalingFit out;
  out.radii = radii;
  for (std::size_t k = 0; k < R; ++k) {
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < opt.replicas; ++i) {
      const double v = vals[static_cast<std::size_t>(i) * R + k];
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / opt.replicas;
    const double var = std::max(sum2 / opt.replicas - mean * mean, 0.0) * opt.replicas / (opt.replicas - 1.0);
    if (!(mean > 0.0)) throw DegenerateInputError("scaling: zero moment estimate, insufficient replicas");
    out.moments.push_back(mean);
    out.moment_se.push_back(std::sqrt(var / opt.replicas));
  }
  out.fit = fit_exponent(out.radii, out.moments);
  return out;
}

IncrementMoment increment_moment_two(const std::vector<double>& x, const std::vector<double>& y,
                                     const Box& T, const HurstVector& H, double gamma, double c,
                                     const MomentOptions& opt) {
  validate_box(T, true);
  const int N = H.n_axes;
  const int d = H.ambient_dim;
  if (x.size() != static_cast<std::size_t>(d) || y.size() != static_cast<std::size_t>(d)) {
    throw ArityError("increment: x and y must have d coordinates");
  }
  const ExponentProfile prof = beta_and_dim(H, d);
  const double gmax = std::min(1.0, prof.alpha_tau / (2.0 * prof.tau));
  if (!(gamma > 0.0 && gamma < gmax)) {
    throw DomainError("increment: gamma must lie in (0, " + std::to_string(gmax) + ")");
  }
  const double r = T.upper[0] - T.lower[0];
  for (std::size_t l = 1; l < T.dim(); ++l) {
    if (std::fabs(T.upper[l] - T.lower[l] - r) > 1e-12 * r) throw DomainError("increment: T must be a cube");
  }
  double dist2 = 0.0;
  for (int i = 0; i < d; ++i) dist2 += (x[i] - y[i]) * (x[i] - y[i]);
  const double dist = std::sqrt(dist2);
  if (dist > 1.0) throw DomainError("increment: need |x - y| <= 1");
  check_anchor(opt.anchor, T);

  const double h_tau = H.sorted()[prof.tau - 1];
  IncrementMoment out;
  out.bound_rhs = c * c * std::pow(2.0, N - prof.beta_tau + (1.0 + h_tau) * gamma) * std::pow(dist, 2.0 * gamma) *
                  std::pow(r, 2.0 * (prof.beta_tau - h_tau * gamma));
  if (dist == 0.0) {
    out.method = "exact";
    return out;
  }

  std::vector<Eigen::VectorXd> zxx, zyy, zxy, zyx;
  for (int i = 0; i < d; ++i) {
    zxx.push_back(Eigen::Vector2d(x[i], x[i]));
    zyy.push_back(Eigen::Vector2d(y[i], y[i]));
    zxy.push_back(Eigen::Vector2d(x[i], y[i]));
    zyx.push_back(Eigen::Vector2d(y[i], x[i]));
  }
  // Unordered pairs: the symmetric combination p(x,x) + p(y,y) - p(x,y) - p(y,x).
  auto comb = [&](const Eigen::MatrixXd& g) {
    return density(g, zxx) + density(g, zyy) - density(g, zxy) - density(g, zyx);
  };
  const Kernel K{H, opt.anchor};
  const Box U = kernel_box(T, opt.anchor);
  if (N == 1) {
    // The combined integrand changes regime at gaps of order |x - y|^{1/H},
    // which defeats the tube extrapolation; each term on its own has a clean
    // diagonal (the cross term vanishes there).
    auto term = [&](const auto& dens) {
      auto F = [&](double t1, double gap) {
        if (!(t1 > 0.0)) return 0.0;
        return dens(pair_increment_cov(H.h[0], t1, gap));
      };
      return tube_moment(F, U, opt.anchor ? 3.0 : 1.0, opt);
    };
    const auto ixx = increment_levels(x, x), iyy = increment_levels(y, y);
    const auto ixy = increment_levels(x, y), iyx = increment_levels(y, x);
    const MomentReport mxx = term([&](const Eigen::MatrixXd& g) { return density(g, ixx); });
    const MomentReport myy = term([&](const Eigen::MatrixXd& g) { return density(g, iyy); });
    const MomentReport mxy = term([&](const Eigen::MatrixXd& g) { return density(g, ixy) + density(g, iyx); });
    out.value = mxx.value + myy.value - mxy.value;
    out.error = mxx.quad_error + myy.quad_error + mxy.quad_error;
    out.method = mxx.method;
  } else {
    const MomentReport m = mc_moment(comb, U, 2, K, opt);
    out.value = m.value;
    out.error = m.quad_error;
    out.method = m.method;
  }
  return out;
}

CuzickPair cuzick_identity_check(const Eigen::MatrixXd& cov, double gamma, double tol) {
  const auto n = cov.rows();
  if (n < 1 || n > 2) throw DomainError("identity: need one or two variables");
  if (!(gamma >= 0.0)) throw DomainError("identity: gamma must be nonnegative");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw DegenerateInputError("identity: variables are linearly dependent");
  const double det = cov.determinant();
  if (!(det > 1e-14 * std::pow(cov.diagonal().maxCoeff(), n))) {
    throw DegenerateInputError("identity: variables are linearly dependent");
  }
  auto g = [&](double v) { return gamma == 0.0 ? 1.0 : std::pow(std::fabs(v), gamma); };
  CuzickPair out;

  // Both halves of the real line through v = +-w^2, which smooths |v|^gamma at 0.
  auto line = [&](const std::function<double(double)>& f, double reach, double t) {
    const double w = std::sqrt(reach);
    const QuadResult a = integrate([&](double u) { return 2.0 * u * f(-u * u); }, 0.0, w, t);
    const QuadResult b = integrate([&](double u) { return 2.0 * u * f(u * u); }, 0.0, w, t);
    return QuadResult{a.value + b.value, a.error + b.error};
  };

  // Direct: int g(v_1) exp(-v' cov v / 2) dv on a box holding all but e^{-72} of the mass.
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov).eigenvalues().minCoeff();
  const double L = 12.0 / std::sqrt(lmin);
  if (n == 1) {
    const QuadResult q = line([&](double v) { return g(v) * std::exp(-0.5 * cov(0, 0) * v * v); }, L, tol);
    out.lhs = q.value;
    out.lhs_error = q.error;
  } else {
    double inner_err = 0.0;
    auto outer = [&](double v1) {
      auto f = [&](double v2) {
        const double q = cov(0, 0) * v1 * v1 + 2.0 * cov(0, 1) * v1 * v2 + cov(1, 1) * v2 * v2;
        return std::exp(-0.5 * q);
      };
      // Tighter inner target so the outer rule does not see quadrature noise.
      const QuadResult a = integrate(f, -L, 0.0, 1e-2 * tol);
      const QuadResult b = integrate(f, 0.0, L, 1e-2 * tol);
      inner_err = std::max(inner_err, (a.error + b.error) * g(v1));
      return g(v1) * (a.value + b.value);
    };
    const QuadResult q = line(outer, L, tol);
    out.lhs = q.value;
    out.lhs_error = q.error + 2.0 * L * inner_err;
  }

  // Reduced: (2 pi)^{(n-1)/2} det^{-1/2} int g(v / sigma_1) e^{-v^2/2} dv.
  const double sigma1 = std::sqrt(conditional_variance(0, cov));
  const QuadResult red = line([&](double v) { return g(v / sigma1) * std::exp(-0.5 * v * v); }, 40.0, tol);
  const double pref = std::pow(kTwoPi, 0.5 * (n - 1)) / std::sqrt(det);
  out.rhs = pref * red.value;
  out.rhs_error = pref * red.error;
  return out;
}

CuzickPair cuzick_identity_check(const std::vector<Point>& points, const CovModel& model,
                                 const HurstVector& H, double gamma, double tol) {
  if (points.empty() || points.size() > 2) throw DomainError("identity: need one or two points");
  return cuzick_identity_check(assemble_cov(points, model, H), gamma, tol);
}

TailReport tail_bound_check(const HurstVector& H, const Point& s, double h, const std::vector<double>& u_grid,
                            const TailOptions& opt) {
  if (s.size() != static_cast<std::size_t>(H.n_axes)) throw ArityError("tail: centre arity");
  if (!(h > 0.0 && h < 1.0)) throw DomainError("tail: h must lie in (0,1)");
  if (opt.replicas < 2) throw DomainError("tail: need at least two replicas");
  std::vector<std::vector<double>> coords(H.n_axes);
  for (int l = 0; l < H.n_axes; ++l) {
    if (!(s[l] > 0.0)) throw DomainError("tail: centre must be in the open quadrant");
    for (int i = 0; i <= opt.cells; ++i) coords[l].push_back(s[l] + h * i / opt.cells);
  }
  const FieldSampler sampler(Grid::from_coords(coords), H, H.ambient_dim);
  std::vector<double> sup(static_cast<std::size_t>(opt.replicas));
  parallel_for(sup.size(), opt.workers, [&](std::size_t i) {
    const FieldSample f = sampler.sample(SeedSpec{opt.seed.master_seed, opt.seed.stream_id + i});
    double m = 0.0;
    for (std::size_t j = 0; j < f.grid.size(); ++j) {
      double o2 = 0.0;
      for (int c = 0; c < f.d; ++c) {
        const double u = f.at(c, j) - f.at(c, 0);  // node 0 is s
        o2 += u * u;
      }
      m = std::max(m, o2);
    }
    sup[i] = std::sqrt(m);
  });

  TailReport rep;
  std::vector<double> sorted = sup;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t R = sorted.size();
  rep.median_sup = R % 2 ? sorted[R / 2] : 0.5 * (sorted[R / 2 - 1] + sorted[R / 2]);
  const double h1 = H.min_h();
  const double scale = std::pow(h, h1);
  rep.c48 = rep.median_sup / scale;
  std::vector<double> lx, ly;
  for (double u : u_grid) {
    const auto above = static_cast<double>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), u));
    const double p = above / R;
    rep.u.push_back(u);
    rep.frequency.push_back(p);
    const bool app = u > rep.c48 * scale;
    rep.applicable.push_back(app);
    if (app && p > 0.0 && p < 1.0) {
      rep.c49 = std::max(rep.c49, u * u / (scale * scale * -std::log(p)));
      lx.push_back(std::log(u));
      ly.push_back(std::log(-std::log(p)));
    }
  }
  for (std::size_t i = 1; i < rep.frequency.size(); ++i) {
    if (rep.u[i] >= rep.u[i - 1] && rep.frequency[i] > rep.frequency[i - 1]) rep.monotone = false;
  }
  if (lx.size() >= 3) rep.tail_slope = fit_line(lx, ly).slope;
  return rep;
}

}  // namespace fbs
