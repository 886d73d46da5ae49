#include "fbs/field_model.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fbs/errors.h"
#include "fbs/quadrature.h"

namespace fbs {
namespace {

void check_arity(const Point& s, const Point& t, const HurstVector& H) {
  const auto n = static_cast<std::size_t>(H.n_axes);
  if (s.size() != n || t.size() != n) {
    throw ArityError("point dimension " + std::to_string(s.size()) + "/" + std::to_string(t.size()) +
                     " does not match N = " + std::to_string(n));
  }
}

void check_nonnegative(const Point& s) {
  for (double x : s) {
    if (x < 0.0) throw DomainError("time coordinates must be nonnegative");
  }
}

double pos_pow(double x, double p) { return x > 0.0 ? std::pow(x, p) : 0.0; }

// Integral over r in [lo, hi] of (s - r)^{h-1/2} (t - r)^{h-1/2}, 0 <= lo <= hi <= min(s, t).
double axis_integral(double h, double s, double t, double lo, double hi, double tol, double* err) {
  if (err) *err = 0.0;
  if (!(hi > lo)) return 0.0;
  if (h == 0.5) return hi - lo;
  const double m = std::min(s, t);
  const double gap = std::fabs(t - s);
  if (gap == 0.0) {
    return (std::pow(m - lo, 2.0 * h) - std::pow(m - hi, 2.0 * h)) / (2.0 * h);
  }
  // x = m - r, then x = y^k with k = 4/(h + 1/2) turns x^{h-1/2} dx into k y^3 dy
  // and leaves (y^k + gap)^{h-1/2}, which is smooth at y = 0.
  const double k = 4.0 / (h + 0.5);
  const double p = h - 0.5;
  const double ylo = std::pow(std::max(m - hi, 0.0), 1.0 / k);
  const double yhi = std::pow(m - lo, 1.0 / k);
  auto f = [&](double y) { return k * y * y * y * std::pow(std::pow(y, k) + gap, p); };
  QuadResult q = integrate(f, ylo, yhi, tol);
  if (err) *err = q.error;
  return q.value;
}

struct AxisParts {
  double low = 0.0;   // r in [0, eps]
  double high = 0.0;  // r in (eps, s ^ t]
  double err = 0.0;
};

AxisParts split_axis(double h, double s, double t, double eps, double tol) {
  AxisParts out;
  double e1 = 0.0, e2 = 0.0;
  out.low = axis_integral(h, s, t, 0.0, eps, tol, &e1);
  out.high = axis_integral(h, s, t, eps, std::min(s, t), tol, &e2);
  out.err = e1 + e2;
  return out;
}

// (1+u)^p - u^p without cancellation for large u.
double ma_diff(double u, double p) {
  if (u >= 1.0) return std::pow(u, p) * std::expm1(p * std::log1p(1.0 / u));
  return std::pow(1.0 + u, p) - std::pow(u, p);
}

}  // namespace

double fbs_cov(const Point& s, const Point& t, const HurstVector& H) {
  check_arity(s, t, H);
  check_nonnegative(s);
  check_nonnegative(t);
  double c = 1.0;
  for (int l = 0; l < H.n_axes; ++l) {
    const double e = 2.0 * H.h[l];
    c *= 0.5 * (pos_pow(s[l], e) + pos_pow(t[l], e) - pos_pow(std::fabs(s[l] - t[l]), e));
  }
  return c;
}

double kernel_g(double h, double t, double s) {
  if (h == 0.5) return (s >= 0.0 && s < t) ? 1.0 : 0.0;
  const double p = h - 0.5;
  return pos_pow(t - s, p) - pos_pow(-s, p);
}

double kappa_axis_squared(double h, double tol, double* err) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("kappa: index outside (0,1)");
  if (!(tol > 0.0)) throw DomainError("kappa: tolerance must be positive");
  if (err) *err = 0.0;
  if (h == 0.5) return 1.0;
  const double p = h - 0.5;
  const double head = 1.0 / (2.0 * h);  // s in [0, 1]

  // u in [0, 1] with u = y^m, m = 2/h: every fractional power of u picks up a
  // factor y^{>= 2} from the Jacobian, so the integrand is smooth at y = 0.
  // The total is at least `head`, which sets an absolute floor for both pieces.
  const double m = 2.0 / h;
  const QuadResult near = integrate(
      [&](double y) {
        if (!(y > 0.0)) return 0.0;
        const double g = ma_diff(std::pow(y, m), p);
        return g * g * m * std::pow(y, m - 1.0);
      },
      0.0, 1.0, tol, 0.1 * tol * head);

  // u in [1, inf): v = 1/u gives v^{-2p} F(v) with F(v) = ((1+v)^p - 1)^2 / v^2
  // analytic; v = y^{mf}, mf = 4/(1 - 2p), turns v^{-2p} dv into y^3 dy.
  const double mf = 4.0 / (1.0 - 2.0 * p);
  const QuadResult far = integrate(
      [&](double y) {
        if (!(y > 0.0)) return 0.0;
        const double v = std::pow(y, mf);
        const double e = v > 0.0 ? std::expm1(p * std::log1p(v)) / v : p;
        return mf * y * y * y * e * e;
      },
      0.0, 1.0, tol, 0.1 * tol * head);

  if (err) *err = near.error + far.error;
  return head + near.value + far.value;
}

KappaValue kappa(const HurstVector& H, double tol) {
  KappaValue k;
  k.per_axis.resize(H.h.size());
  double rel = 0.0;
  for (std::size_t l = 0; l < H.h.size(); ++l) {
    double e = 0.0;
    const double sq = kappa_axis_squared(H.h[l], tol, &e);
    k.per_axis[l] = std::sqrt(sq);
    k.value *= k.per_axis[l];
    rel += 0.5 * e / sq;
  }
  k.quad_error = k.value * rel;
  return k;
}

double liouville_cov(const Point& s, const Point& t, const HurstVector& H, double tol) {
  check_arity(s, t, H);
  check_nonnegative(s);
  check_nonnegative(t);
  double c = 1.0;
  for (int l = 0; l < H.n_axes; ++l) {
    c *= axis_integral(H.h[l], s[l], t[l], 0.0, std::min(s[l], t[l]), tol, nullptr);
    if (c == 0.0) return 0.0;
  }
  return c;
}

std::string to_string(RegionComponent::Kind kind) {
  switch (kind) {
    case RegionComponent::Kind::corner: return "corner";
    case RegionComponent::Kind::slab: return "slab";
    case RegionComponent::Kind::remainder: return "remainder";
    case RegionComponent::Kind::full: return "full";
  }
  return "unknown";
}

ComponentCovs all_components(double eps, const Point& s, const Point& t, const HurstVector& H,
                             double tol) {
  check_arity(s, t, H);
  if (!(eps > 0.0)) throw DomainError("component: epsilon must be positive");
  for (int l = 0; l < H.n_axes; ++l) {
    if (eps > s[l] || eps > t[l]) {
      throw DomainError("component: epsilon exceeds coordinate on axis " + std::to_string(l + 1));
    }
  }
  const int n = H.n_axes;
  std::vector<AxisParts> parts(n);
  for (int l = 0; l < n; ++l) parts[l] = split_axis(H.h[l], s[l], t[l], eps, tol);

  ComponentCovs out;
  out.corner = 1.0;
  for (const auto& p : parts) out.corner *= p.low;
  out.slab.assign(n, 0.0);
  for (int a = 0; a < n; ++a) {
    double c = parts[a].high;
    for (int l = 0; l < n; ++l) {
      if (l != a) c *= parts[l].low;
    }
    out.slab[a] = c;
  }
  // Remainder: every sub-box with at least two axes on the high side. Same
  // per-axis integrals as the other components, so additivity is exact in
  // exact arithmetic and the value is a sum of nonnegative terms.
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) < 2) continue;
    double c = 1.0;
    for (int l = 0; l < n; ++l) c *= (mask >> l & 1u) ? parts[l].high : parts[l].low;
    out.remainder += c;
  }
  double total = 1.0, rel = 0.0;
  for (const auto& p : parts) {
    total *= p.low + p.high;
    if (p.low + p.high > 0.0) rel += p.err / (p.low + p.high);
  }
  out.quad_error = total * rel;
  return out;
}

double component_cov(const RegionComponent& region, const Point& s, const Point& t,
                     const HurstVector& H, double tol) {
  using K = RegionComponent::Kind;
  if (region.kind == K::full) return liouville_cov(s, t, H, tol);
  if (region.kind == K::slab && (region.axis < 0 || region.axis >= H.n_axes)) {
    throw DomainError("component: slab axis out of range");
  }
  const ComponentCovs c = all_components(region.epsilon, s, t, H, tol);
  if (region.kind == K::corner) return c.corner;
  if (region.kind == K::slab) return c.slab[region.axis];
  return c.remainder;
}

double slab_lower_bound(int axis, double eps, const Point& t_n, double t_prev,
                        const HurstVector& H) {
  if (t_n.size() != static_cast<std::size_t>(H.n_axes)) throw ArityError("slab bound: point arity");
  if (axis < 0 || axis >= H.n_axes) throw DomainError("slab bound: axis out of range");
  if (!(eps > 0.0)) throw DomainError("slab bound: epsilon must be positive");
  for (double x : t_n) {
    if (!(eps < x)) throw DomainError("slab bound: epsilon must be below every coordinate");
  }
  if (t_prev > t_n[axis] || t_prev < eps) {
    throw DomainError("slab bound: need eps <= t_prev <= t_n[axis]");
  }
  double c = 1.0;
  for (int k = 0; k < H.n_axes; ++k) {
    const double e = 2.0 * H.h[k];
    if (k == axis) {
      c *= std::pow(t_n[k] - t_prev, e) / e;
    } else {
      c *= (std::pow(t_n[k], e) - std::pow(t_n[k] - eps, e)) / e;
    }
  }
  return c;
}

std::vector<PartitionBox> partition_boxes(double eps, const Point& t) {
  if (t.empty()) throw ArityError("partition: empty point");
  for (double x : t) {
    if (!(eps > 0.0 && eps < x)) throw DomainError("partition: need 0 < eps < min coordinate");
  }
  const unsigned n = static_cast<unsigned>(t.size());
  std::vector<PartitionBox> out;
  out.reserve(1u << n);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    PartitionBox pb;
    pb.box.lower.assign(n, 0.0);
    pb.box.upper.assign(n, eps);
    for (unsigned l = 0; l < n; ++l) {
      if (mask >> l & 1u) {
        pb.box.lower[l] = eps;
        pb.box.upper[l] = t[l];
      }
    }
    const int highs = __builtin_popcount(mask);
    if (highs == 0) {
      pb.kind = RegionComponent::Kind::corner;
    } else if (highs == 1) {
      pb.kind = RegionComponent::Kind::slab;
      pb.axis = __builtin_ctz(mask);
    } else {
      pb.kind = RegionComponent::Kind::remainder;
    }
    out.push_back(pb);
  }
  // corner, slabs in axis order, then remainder boxes
  std::stable_sort(out.begin(), out.end(), [](const PartitionBox& a, const PartitionBox& b) {
    auto rank = [](const PartitionBox& x) {
      return x.kind == RegionComponent::Kind::corner ? 0 : x.kind == RegionComponent::Kind::slab ? 1 : 2;
    };
    if (rank(a) != rank(b)) return rank(a) < rank(b);
    return a.axis < b.axis;
  });
  return out;
}

double model_cov(const CovModel& model, const Point& s, const Point& t, const HurstVector& H) {
  switch (model.kind) {
    case CovModel::Kind::full_sheet: return fbs_cov(s, t, H);
    case CovModel::Kind::liouville: return liouville_cov(s, t, H, model.tol);
    case CovModel::Kind::component: return component_cov(model.region, s, t, H, model.tol);
  }
  return 0.0;
}

double default_epsilon(const Box& interval) {
  return 0.5 * *std::min_element(interval.lower.begin(), interval.lower.end());
}

}  // namespace fbs
