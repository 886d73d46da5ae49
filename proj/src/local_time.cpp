#include "fbs/local_time.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <string>

#include "fbs/errors.h"
#include "fbs/regression.h"

namespace fbs {

std::vector<double> time_weights(const Grid& g, const Box& T) {
  if (T.dim() != static_cast<std::size_t>(g.n_axes())) throw ArityError("box and grid dimensions differ");
  std::vector<std::vector<double>> axis_w(g.n_axes());
  for (int l = 0; l < g.n_axes(); ++l) {
    const auto& c = g.axis(l);
    const auto& w = g.widths(l);
    axis_w[l].resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      axis_w[l][i] = (c[i] >= T.lower[l] && c[i] <= T.upper[l]) ? w[i] : 0.0;
    }
  }
  std::vector<double> out(g.size());
  std::vector<std::size_t> mi(g.n_axes(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = 1.0;
    for (int l = 0; l < g.n_axes(); ++l) v *= axis_w[l][mi[l]];
    out[i] = v;
    for (int l = g.n_axes() - 1; l >= 0; --l) {
      if (++mi[l] < axis_w[l].size()) break;
      mi[l] = 0;
    }
  }
  return out;
}

namespace {

double sq_dist(const FieldSample& s, std::size_t i, const std::vector<double>& x) {
  double acc = 0.0;
  for (int c = 0; c < s.d; ++c) {
    const double u = s.at(c, i) - x[c];
    acc += u * u;
  }
  return acc;
}

void check_x(const FieldSample& s, const std::vector<double>& x) {
  if (x.size() != static_cast<std::size_t>(s.d)) throw ArityError("spatial point must have d coordinates");
}

}  // namespace

std::size_t BinLattice::size() const {
  std::size_t n = 1;
  for (int b : bins) n *= static_cast<std::size_t>(b);
  return n;
}

double BinLattice::bin_volume() const { return std::pow(width, d()); }

long BinLattice::locate(const double* x) const {
  long idx = 0;
  for (int c = 0; c < d(); ++c) {
    const double f = std::floor((x[c] - lower[c]) / width);
    if (f < 0.0 || f >= bins[c]) return -1;
    idx = idx * bins[c] + static_cast<long>(f);
  }
  return idx;
}

std::vector<int> BinLattice::multi_index(std::size_t flat) const {
  std::vector<int> mi(d());
  for (int c = d() - 1; c >= 0; --c) {
    mi[c] = static_cast<int>(flat % bins[c]);
    flat /= bins[c];
  }
  return mi;
}

std::vector<double> BinLattice::center(std::size_t flat) const {
  const auto mi = multi_index(flat);
  std::vector<double> x(d());
  for (int c = 0; c < d(); ++c) x[c] = lower[c] + (mi[c] + 0.5) * width;
  return x;
}

double LocalTimeField::recovered_mass() const {
  double s = overflow_mass;
  for (double v : values) s += v * bin_volume;
  return s;
}

LocalTimeField occupation_histogram(const FieldSample& sample, const Box& T, const LatticeSpec& spec) {
  if (!(spec.width > 0.0)) throw DomainError("histogram: bin width must be positive");
  const int d = sample.d;
  const std::vector<double> w = time_weights(sample.grid, T);
  const std::size_t n = sample.grid.size();

  LocalTimeField f;
  f.box = T;
  f.lattice.width = spec.width;
  if (spec.window_from_sample) {
    std::vector<double> anchor = spec.anchor.empty() ? std::vector<double>(d, 0.0) : spec.anchor;
    if (anchor.size() != static_cast<std::size_t>(d)) throw ArityError("histogram: anchor arity");
    for (int c = 0; c < d; ++c) {
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t i = 0; i < n; ++i) {
        if (w[i] > 0.0) {
          lo = std::min(lo, sample.at(c, i));
          hi = std::max(hi, sample.at(c, i));
        }
      }
      if (!(lo <= hi)) throw DomainError("histogram: box contains no grid cells");
      // bins are [anchor + (k - 1/2) w, anchor + (k + 1/2) w)
      const double k_lo = std::floor((lo - anchor[c]) / spec.width + 0.5) - spec.margin;
      const double k_hi = std::floor((hi - anchor[c]) / spec.width + 0.5) + spec.margin;
      f.lattice.lower.push_back(anchor[c] + (k_lo - 0.5) * spec.width);
      f.lattice.bins.push_back(static_cast<int>(k_hi - k_lo) + 1);
    }
  } else {
    if (spec.lower.size() != static_cast<std::size_t>(d) || spec.bins.size() != static_cast<std::size_t>(d)) {
      throw ArityError("histogram: fixed window arity");
    }
    f.lattice.lower = spec.lower;
    f.lattice.bins = spec.bins;
  }
  f.bin_volume = f.lattice.bin_volume();
  f.mass.assign(f.lattice.size(), 0.0);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] == 0.0) continue;
    f.time_mass += w[i];
    for (int c = 0; c < d; ++c) x[c] = sample.at(c, i);
    const long b = f.lattice.locate(x.data());
    if (b < 0) {
      f.overflow_mass += w[i];
    } else {
      f.mass[static_cast<std::size_t>(b)] += w[i];
    }
  }
  f.values.resize(f.mass.size());
  for (std::size_t b = 0; b < f.mass.size(); ++b) f.values[b] = f.mass[b] / f.bin_volume;
  for (int l = 0; l < sample.grid.n_axes(); ++l) {
    const auto& ws = sample.grid.widths(l);
    f.grid_spacing.push_back(*std::max_element(ws.begin(), ws.end()));
  }
  return f;
}

double kernel_local_time(const FieldSample& sample, const Box& T, const std::vector<double>& x, double k) {
  check_x(sample, x);
  if (!(k > 0.0)) throw DomainError("kernel local time: k must be positive");
  const std::vector<double> w = time_weights(sample.grid, T);
  const double norm = std::pow(k / (2.0 * std::numbers::pi), 0.5 * sample.d);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) s += w[i] * std::exp(-0.5 * k * sq_dist(sample, i, x));
  }
  return norm * s;
}

namespace {

double eval_test(const TestFunction& f, const double* x, int d, const BinLattice& lat) {
  return std::visit(
      [&](const auto& g) -> double {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, ConstantOne>) {
          return 1.0;
        } else if constexpr (std::is_same_v<G, BinIndicator>) {
          const long b = lat.locate(x);
          if (b < 0) return 0.0;
          return lat.multi_index(static_cast<std::size_t>(b)) == g.bin ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<G, GaussianBump>) {
          double acc = 0.0;
          for (int c = 0; c < d; ++c) {
            const double u = (x[c] - g.center[c]) / g.scale;
            acc += u * u;
          }
          return std::exp(-0.5 * acc);
        } else {
          double prod = 1.0;
          for (int c = 0; c < d; ++c) {
            if (x[c] < g.lo || x[c] > g.hi) return 0.0;
            double p = 0.0;
            for (auto it = g.coeffs.rbegin(); it != g.coeffs.rend(); ++it) p = p * x[c] + *it;
            prod *= p;
          }
          return prod;
        }
      },
      f);
}

}  // namespace

OccupationPair occupation_check(const FieldSample& sample, const Box& T, const LocalTimeField& ltf,
                                const TestFunction& f) {
  if (const auto* g = std::get_if<GaussianBump>(&f)) {
    if (g->center.size() != static_cast<std::size_t>(sample.d)) throw ArityError("bump centre arity");
  }
  const std::vector<double> w = time_weights(sample.grid, T);
  OccupationPair out;
  std::vector<double> x(sample.d);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) continue;
    for (int c = 0; c < sample.d; ++c) x[c] = sample.at(c, i);
    out.direct += w[i] * eval_test(f, x.data(), sample.d, ltf.lattice);
  }
  for (std::size_t b = 0; b < ltf.values.size(); ++b) {
    if (ltf.values[b] == 0.0) continue;
    const auto c = ltf.lattice.center(b);
    out.via_density += eval_test(f, c.data(), sample.d, ltf.lattice) * ltf.values[b] * ltf.bin_volume;
  }
  if (std::holds_alternative<ConstantOne>(f)) out.via_density += ltf.overflow_mass;
  return out;
}

MaxLocalTime max_local_time(const LocalTimeField& ltf) {
  MaxLocalTime m;
  if (ltf.values.empty()) return m;
  const auto it = std::max_element(ltf.values.begin(), ltf.values.end());
  m.value = *it;
  m.argmax = static_cast<std::size_t>(it - ltf.values.begin());
  m.center = ltf.lattice.center(m.argmax);
  return m;
}

RangeBound range_bound_check(const FieldSample& sample, const LocalTimeField& ltf) {
  const std::vector<double> w = time_weights(sample.grid, ltf.box);
  RangeBound r;
  r.time_mass = ltf.time_mass;
  r.l_star = max_local_time(ltf).value;
  r.padded_range_volume = 1.0;
  for (int c = 0; c < sample.d; ++c) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] > 0.0) {
        lo = std::min(lo, sample.at(c, i));
        hi = std::max(hi, sample.at(c, i));
      }
    }
    r.padded_range_volume *= (hi - lo) + 2.0 * ltf.lattice.width;
  }
  const double binned = ltf.time_mass - ltf.overflow_mass;
  r.holds = binned <= r.l_star * r.padded_range_volume * (1.0 + 1e-12);
  return r;
}

double local_time_box(const FieldSample& sample, const Box& T, const std::vector<double>& x, double w) {
  check_x(sample, x);
  if (!(w > 0.0)) throw DomainError("local time: bin width must be positive");
  const std::vector<double> cw = time_weights(sample.grid, T);
  const double half = 0.5 * w;
  double mass = 0.0;
  for (std::size_t i = 0; i < cw.size(); ++i) {
    if (cw[i] == 0.0) continue;
    bool in = true;
    for (int c = 0; c < sample.d && in; ++c) {
      const double u = sample.at(c, i) - x[c];
      in = u >= -half && u < half;
    }
    if (in) mass += cw[i];
  }
  return mass / std::pow(w, sample.d);
}

double local_time_ball(const FieldSample& sample, const Point& center, double r,
                       const std::vector<double>& x, double w) {
  check_x(sample, x);
  const Grid& g = sample.grid;
  if (center.size() != static_cast<std::size_t>(g.n_axes())) throw ArityError("ball centre arity");
  const double half = 0.5 * w;
  double mass = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double vol = g.cell_volume(i);
    if (vol == 0.0) continue;
    const Point t = g.point(i);
    double dist2 = 0.0;
    for (std::size_t l = 0; l < t.size(); ++l) dist2 += (t[l] - center[l]) * (t[l] - center[l]);
    if (dist2 >= r * r) continue;
    bool in = true;
    for (int c = 0; c < sample.d && in; ++c) {
      const double u = sample.at(c, i) - x[c];
      in = u >= -half && u < half;
    }
    if (in) mass += vol;
  }
  return mass / std::pow(w, sample.d);
}

std::vector<Point> level_set_points(const FieldSample& sample, const std::vector<double>& x, double tol) {
  check_x(sample, x);
  if (!(tol >= 0.0)) throw DomainError("level set: tolerance must be nonnegative");
  std::vector<Point> out;
  for (std::size_t i = 0; i < sample.grid.size(); ++i) {
    if (sq_dist(sample, i, x) <= tol * tol) out.push_back(sample.grid.point(i));
  }
  return out;
}

BoxCount box_counting(const FieldSample& sample, const std::vector<double>& x, const std::vector<int>& levels) {
  check_x(sample, x);
  const Grid& g = sample.grid;
  const int n = g.n_axes();
  const auto shape = g.shape();
  for (int l = 0; l < n; ++l) {
    const auto& c = g.axis(l);
    if (c.size() < 2) throw DomainError("box counting: need at least two nodes per axis");
    const double step = (c.back() - c.front()) / static_cast<double>(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (std::fabs(c[i] - c[i - 1] - step) > 1e-9 * step) throw DomainError("box counting: nodes must be evenly spaced");
    }
  }
  BoxCount out;
  for (int j : levels) {
    const std::size_t s = std::size_t{1} << j;
    std::vector<std::size_t> nb(n);
    std::size_t total = 1;
    for (int l = 0; l < n; ++l) {
      nb[l] = (shape[l] - 1) / s;
      if (nb[l] == 0) throw DomainError("box counting: level exceeds grid");
      total *= nb[l];
    }
    std::size_t hits = 0;
    std::vector<std::size_t> box(n, 0), off(n, 0), mi(n);
    for (std::size_t b = 0; b < total; ++b) {
      std::vector<double> lo(sample.d, INFINITY), hi(sample.d, -INFINITY);
      std::fill(off.begin(), off.end(), 0);
      while (true) {
        for (int l = 0; l < n; ++l) mi[l] = box[l] * s + off[l];
        const std::size_t i = g.flat_index(mi);
        for (int c = 0; c < sample.d; ++c) {
          lo[c] = std::min(lo[c], sample.at(c, i));
          hi[c] = std::max(hi[c], sample.at(c, i));
        }
        int l = n - 1;
        for (; l >= 0; --l) {
          if (++off[l] <= s) break;
          off[l] = 0;
        }
        if (l < 0) break;
      }
      bool hit = true;
      for (int c = 0; c < sample.d; ++c) hit = hit && lo[c] <= x[c] && x[c] <= hi[c];
      hits += hit ? 1 : 0;
      for (int l = n - 1; l >= 0; --l) {
        if (++box[l] < nb[l]) break;
        box[l] = 0;
      }
    }
    const auto& c0 = g.axis(0);
    out.sizes.push_back(static_cast<double>(s) * (c0[1] - c0[0]));
    out.counts.push_back(static_cast<double>(hits));
  }
  bool all_positive = true;
  for (double c : out.counts) all_positive = all_positive && c > 0.0;
  if (all_positive && out.counts.size() >= 3) {
    const FitResult fr = fit_exponent(out.sizes, out.counts);
    out.dimension = -fr.slope;
    out.stderr_ = fr.stderr_;
  }
  return out;
}

OscillationRecord oscillation_stats(const FieldSample& sample, const Point& s, const std::vector<double>& radii) {
  const Grid& g = sample.grid;
  if (s.size() != static_cast<std::size_t>(g.n_axes())) throw ArityError("oscillation: centre arity");
  OscillationRecord rec;
  const auto ci = g.nearest(s);
  const std::size_t centre = g.flat_index(ci);
  rec.center = g.point(centre);
  for (double r : radii) {
    if (!(r > 0.0)) throw DomainError("oscillation: radii must be positive");
    for (int l = 0; l < g.n_axes(); ++l) {
      if (rec.center[l] - r < g.axis(l).front() - 1e-12 || rec.center[l] + r > g.axis(l).back() + 1e-12) {
        throw DomainError("oscillation: radius " + std::to_string(r) + " exceeds the sampled grid");
      }
    }
  }
  // Sort nodes by distance once; the supremum over an open ball is then a prefix maximum.
  std::vector<std::pair<double, double>> pts;  // (distance, |B(t) - B(s)|)
  pts.reserve(g.size());
  const double rmax = radii.empty() ? 0.0 : *std::max_element(radii.begin(), radii.end());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point t = g.point(i);
    double d2 = 0.0;
    for (std::size_t l = 0; l < t.size(); ++l) d2 += (t[l] - rec.center[l]) * (t[l] - rec.center[l]);
    const double dist = std::sqrt(d2);
    if (dist >= rmax) continue;
    double o2 = 0.0;
    for (int c = 0; c < sample.d; ++c) {
      const double u = sample.at(c, i) - sample.at(c, centre);
      o2 += u * u;
    }
    pts.emplace_back(dist, std::sqrt(o2));
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> prefix(pts.size());
  double m = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) prefix[i] = m = std::max(m, pts[i].second);
  for (double r : radii) {
    const auto it = std::lower_bound(pts.begin(), pts.end(), std::make_pair(r, -std::numeric_limits<double>::infinity()));
    const auto k = static_cast<std::size_t>(it - pts.begin());
    rec.radii.push_back(r);
    rec.sup_osc.push_back(k == 0 ? 0.0 : prefix[k - 1]);
  }
  return rec;
}

double coupled_spacing(double h1, double bin_width) {
  if (!(h1 > 0.0 && h1 < 1.0) || !(bin_width > 0.0)) throw DomainError("coupled spacing: bad arguments");
  return std::pow(0.25 * bin_width, 1.0 / h1);
}

}  // namespace fbs
