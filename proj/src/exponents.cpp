#include "fbs/exponents.h"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fbs/errors.h"
#include "fbs/quadrature.h"

namespace fbs {
namespace {

int tau_of(const std::vector<double>& h, double q) {
  if (!(q >= 0.0)) throw DomainError("tau: q must be nonnegative");
  double s = 0.0;
  for (std::size_t l = 0; l < h.size(); ++l) {
    const double next = s + 1.0 / h[l];
    if (s <= q && q < next) return static_cast<int>(l) + 1;
    s = next;
  }
  throw DomainError("tau: q = " + std::to_string(q) + " is not below sum 1/H_l = " + std::to_string(s) +
                    " (no local time regime)");
}

// delta_tau for the ascending index h and argument q.
double delta_thr(const std::vector<double>& h, double q) {
  const int t = tau_of(h, q);
  if (t == 2 && h[0] != h[1]) {
    // With 1/p_1 fixed by equality in the exponent balance, H_2 q / p_2 < 1 is
    // a linear inequality in delta; this is its exact threshold.
    const double h1 = h[0], h2 = h[1];
    const double A = h1 * h2 * q * (h2 - h1);
    const double B = h1 * h1 * h2 * q;
    const double C = (h2 - h1) * (h2 + h1);
    const double D = (h2 - h1) * h1;
    return std::min(1.0, (C - A) / (B + D));
  }
  return 1.0;
}

// Recursive construction; h is the ascending prefix h_1..h_tau with q in its
// top regime. Returns p and writes the top-level eta.
std::vector<double> build(const std::vector<double>& h, double q, double delta, double* eta_out) {
  const int t = tau_of(h, q);
  if (eta_out) *eta_out = 0.0;
  if (t == 1) return {1.0};
  if (t == 2) {
    const double h1 = h[0], h2 = h[1];
    double ip1;
    if (h1 == h2) {
      // 1/p_1 = 1/(x + eta) with eta in (0, (2 - x) x / (x - 1)); midpoint.
      const double x = h1 * q;
      const double eta = x == 1.0 ? 1.0 : 0.5 * (2.0 - x) * x / (x - 1.0);
      if (eta_out) *eta_out = eta;
      ip1 = 1.0 / (x + eta);
    } else {
      ip1 = 1.0 / ((1.0 - delta) * h1 * q) - delta / (1.0 - delta) * h2 / (h2 - h1);
    }
    return {1.0 / ip1, 1.0 / (1.0 - ip1)};
  }
  // Induction: drop the first axis, solve for q' = q - 1/H_1, then mix.
  const double h1 = h[0];
  const double qq = q - 1.0 / h1;
  const std::vector<double> sub(h.begin() + 1, h.begin() + t);
  const double dp = 0.5 * std::min(delta, delta_thr(sub, qq));
  const std::vector<double> pp = build(sub, qq, dp, nullptr);
  const double x = h1 * q;
  double eta_a = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sub.size(); ++i) eta_a = std::min(eta_a, pp[i] / (sub[i] * q));
  eta_a += -1.0 + 1.0 / x;
  const double eta_b = ((1.0 - dp) / (1.0 - delta) - 1.0) * (x - 1.0) / x;
  const double eta = 0.5 * std::min({eta_a, eta_b, 1.0 / x});
  if (eta_out) *eta_out = eta;
  std::vector<double> p(t);
  p[0] = 1.0 / (1.0 / x - eta);
  for (std::size_t i = 0; i < sub.size(); ++i) p[i + 1] = pp[i] / (1.0 - 1.0 / x + eta);
  return p;
}

double log_factorial(int n) { return std::lgamma(n + 1.0); }

}  // namespace

int tau_index(const HurstVector& H, double q) { return tau_of(H.sorted(), q); }

double delta_threshold(const HurstVector& H, double q) { return delta_thr(H.sorted(), q); }

HolderWeights construct_weights(const HurstVector& H, double q, double delta, double rho) {
  const std::vector<double> h = H.sorted();
  HolderWeights w;
  w.tau = tau_of(h, q);
  w.delta_tau = delta_thr(h, q);
  if (!(delta > 0.0 && delta < w.delta_tau)) {
    throw DomainError("weights: delta must lie in (0, delta_tau) with delta_tau = " +
                      std::to_string(w.delta_tau));
  }
  w.delta = delta;
  const std::vector<double> prefix(h.begin(), h.begin() + w.tau);
  w.p = build(prefix, q, delta, &w.eta);

  w.alpha = -q;
  for (double x : prefix) w.alpha += 1.0 / x;
  w.rho = rho < 0.0 ? w.alpha / (4.0 * w.tau) : rho;
  if (!(w.rho > 0.0 && w.rho < w.alpha / (2.0 * w.tau))) {
    throw DomainError("weights: rho must lie in (0, alpha_tau / (2 tau))");
  }

  w.eps.resize(w.tau);
  int best = 0;
  for (int l = 0; l < w.tau; ++l) {
    w.eps[l] = 1.0 - prefix[l] * q / w.p[l];
    if (w.eps[l] / prefix[l] > w.eps[best] / prefix[best]) best = l;
  }
  // Smallest index with eps_l >= H_l alpha / tau; some index always qualifies
  // because sum eps_l / H_l = alpha.
  w.ell0 = best + 1;
  for (int l = 0; l < w.tau; ++l) {
    if (w.eps[l] >= prefix[l] * w.alpha / w.tau * (1.0 - 1e-12)) {
      w.ell0 = l + 1;
      break;
    }
  }
  return w;
}

ExponentProfile beta_and_dim(const HurstVector& H, int d) {
  if (d < 0) throw DomainError("exponents: d must be nonnegative");
  const std::vector<double> h = H.sorted();
  const double q = d;
  ExponentProfile e;
  e.q = q;
  e.tau = tau_of(h, q);
  const int n = H.n_axes;
  double inv_all = 0.0;
  for (double x : h) inv_all += 1.0 / x;
  e.nu = q / inv_all;

  e.candidates.resize(n);
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int l = 0; l < k; ++l) s += h[k - 1] / h[l];
    e.candidates[k - 1] = s + n - k - h[k - 1] * q;
  }
  e.beta_tau = e.candidates[e.tau - 1];
  e.dim_level_set = *std::min_element(e.candidates.begin(), e.candidates.end());
  e.alpha_tau = -q;
  for (int l = 0; l < e.tau; ++l) e.alpha_tau += 1.0 / h[l];
  if (e.beta_tau - e.dim_level_set > 1e-12 * std::max(1.0, std::fabs(e.beta_tau))) {
    throw NumericalError("exponents: dimension minimum not attained at tau", e.beta_tau - e.dim_level_set);
  }
  return e;
}

GaugeFunction GaugeFunction::phi1(double beta_tau, int n_axes) {
  if (!(beta_tau > 0.0 && beta_tau <= n_axes)) throw DomainError("phi1: beta must lie in (0, N]");
  return GaugeFunction(Kind::phi1, beta_tau, n_axes - beta_tau);
}

GaugeFunction GaugeFunction::lil_g(double h1, int n_axes, int d) {
  const double a = n_axes - h1 * d;
  if (!(a > 0.0)) throw DomainError("lil_g: need N - H_1 d > 0");
  return GaugeFunction(Kind::lil_g, a, h1 * d);
}

double GaugeFunction::r_max() const {
  double r = std::exp(-std::exp(1.0));
  if (log_power_ > 0.0) {
    // increasing iff y log y > log_power / power with y = log 1/r
    const double target = log_power_ / power_;
    double lo = 1.0, hi = 2.0;
    while (hi * std::log(hi) < target) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (mid * std::log(mid) < target ? lo : hi) = mid;
    }
    r = std::min(r, std::exp(-hi));
  }
  return r;
}

double GaugeFunction::operator()(double r) const {
  if (!(r > 0.0 && r <= r_max())) throw DomainError("gauge: r outside (0, r_max]");
  const double ll = std::log(std::log(1.0 / r));  // log log 1/r, >= 1 below r_max
  return std::exp(power_ * std::log(r) + log_power_ * std::log(ll));
}

double dirichlet_bound_shape(int n, double r, double alpha) {
  return std::exp((alpha - 1.0) * log_factorial(n) + n * (1.0 - (1.0 - 1.0 / n) * alpha) * std::log(r));
}

DirichletResult dirichlet_integral(int n, double a, double r, double s0, double alpha, double c32,
                                   double tol, std::uint64_t mc_seed, int mc_samples) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("dirichlet: alpha must lie in (0,1)");
  if (n < 1 || n > 4) throw DomainError("dirichlet: n must be in 1..4");
  if (!(a > 0.0) || !(r > 0.0)) throw DomainError("dirichlet: a and r must be positive");
  if (!(s0 >= 0.0 && s0 <= 0.5 * a)) throw DomainError("dirichlet: s0 must lie in [0, a/2]");
  const double b = a + r;
  DirichletResult out;

  if (n == 1) {
    const QuadResult q = integrate([&](double s) { return std::pow(s - s0, -alpha); }, a, b, tol);
    out.lhs = q.value;
    out.lhs_error = q.error;
  } else if (n == 2) {
    // Inner variable s_2 = s_1 + (b - s_1) y^k with k = 2/(1 - alpha) turns the
    // endpoint singularity into a polynomial weight.
    const double k = 2.0 / (1.0 - alpha);
    double inner_err = 0.0;
    auto outer = [&](double s1) {
      const double span = b - s1;
      auto inner = [&](double y) {
        const double yk = std::pow(y, k);
        const double gap = span * yk;
        return gap > 0.0 ? std::pow(gap, -alpha) * span * k * yk / y : 0.0;
      };
      const QuadResult qi = integrate(inner, 0.0, 1.0, tol);
      inner_err = std::max(inner_err, qi.error);
      return std::pow(s1 - s0, -alpha) * qi.value;
    };
    // The outer integrand behaves like (b - s_1)^{1 - alpha}; same substitution at b.
    const QuadResult q = integrate([&](double z) { return outer(b - r * std::pow(z, k)) * r * k * std::pow(z, k - 1.0); },
                                   0.0, 1.0, tol);
    out.lhs = q.value;
    out.lhs_error = q.error + inner_err * r * std::pow(a - s0, -alpha);
  } else {
    // Gaps (s_1 - a, s_2 - s_1, ..., b - s_n) / r drawn from Dirichlet(1, 1-alpha,
    // ..., 1-alpha, 1); the importance weight is then bounded.
    out.monte_carlo = true;
    boost::random::mt19937_64 gen(mc_seed);
    boost::random::gamma_distribution<double> g_one(1.0), g_gap(1.0 - alpha);
    const double log_b = (n - 1) * std::lgamma(1.0 - alpha) - std::lgamma(2.0 + (n - 1) * (1.0 - alpha));
    const double scale = std::exp(log_b + (n - (n - 1) * alpha) * std::log(r));
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < mc_samples; ++i) {
      const double g0 = g_one(gen);
      double tot = g0;
      for (int j = 1; j < n; ++j) tot += g_gap(gen);
      tot += g_one(gen);
      const double s1 = a + r * g0 / tot;
      const double w = std::pow(s1 - s0, -alpha);
      sum += w;
      sum2 += w * w;
    }
    const double mean = sum / mc_samples;
    const double var = std::max(sum2 / mc_samples - mean * mean, 0.0);
    out.lhs = scale * mean;
    out.lhs_error = scale * std::sqrt(var / mc_samples);
  }

  using boost::math::tgamma;
  const double m = (n - 1) * (1.0 - alpha);
  const double pref = tgamma(2.0 - alpha) * std::pow(tgamma(1.0 - alpha), n - 2) /
                      ((1.0 - alpha) * tgamma(1.0 + m));
  const double kt = 2.0 / (1.0 - alpha);
  const QuadResult tail = integrate(
      [&](double z) {
        const double zk = std::pow(z, kt);
        return z > 0.0 ? std::pow(r * zk, m) * std::pow(b - r * zk - s0, -alpha) * r * kt * zk / z : 0.0;
      },
      0.0, 1.0, tol);
  out.rhs_exact = pref * tail.value;
  out.rhs_exact_error = pref * tail.error;
  out.rhs_bound = std::pow(c32, n) * dirichlet_bound_shape(n, r, alpha);
  return out;
}

double calibrate_c32(const std::vector<DirichletInput>& inputs, double tol) {
  double c = 0.0;
  for (const auto& in : inputs) {
    const DirichletResult res = dirichlet_integral(in.n, in.a, in.r, in.s0, in.alpha, 1.0, tol);
    const double upper = res.lhs + 2.0 * res.lhs_error;
    c = std::max(c, std::pow(upper / dirichlet_bound_shape(in.n, in.r, in.alpha), 1.0 / in.n));
  }
  return c;
}

}  // namespace fbs
