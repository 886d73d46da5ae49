#include "fbs/scaling.h"

#include <algorithm>
#include <cmath>

#include "fbs/errors.h"
#include "fbs/gaussian_engine.h"
#include "fbs/local_time.h"
#include "fbs/parallel.h"

namespace fbs {
namespace {

void check_series(const HurstVector& H, const Point& s, const std::vector<double>& radii,
                  const ReplicaOptions& opt) {
  if (s.size() != static_cast<std::size_t>(H.n_axes)) throw ArityError("scaling: centre needs N coordinates");
  if (radii.size() < 3) throw DomainError("scaling: need at least three radii");
  if (opt.replicas < 2) throw DomainError("scaling: need at least two replicas");
  if (opt.cells < 2) throw DomainError("scaling: need at least two cells per axis");
  for (double r : radii) {
    if (!(r > 0.0)) throw DomainError("scaling: radii must be positive");
    for (double c : s) {
      if (!(c - r > 0.0)) throw DomainError("scaling: [s - r, s + r] must stay in the open orthant");
    }
  }
}

Box centred(const Point& s, double r) {
  Box b;
  for (double c : s) {
    b.lower.push_back(c - r);
    b.upper.push_back(c + r);
  }
  return b;
}

// Stream for replica i at radius k; radii never share deviates.
SeedSpec stream(const SeedSpec& base, std::size_t k, std::size_t i) {
  return SeedSpec{base.master_seed, base.stream_id + (static_cast<std::uint64_t>(k) << 32) + i};
}

}  // namespace

ScalingSeries oscillation_scaling(const HurstVector& H, const Point& s, const std::vector<double>& radii,
                                  const ReplicaOptions& opt) {
  check_series(H, s, radii, opt);
  ScalingSeries out;
  out.statistic = "mean-log";
  out.radii = radii;
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double r = radii[k];
    std::vector<std::vector<double>> coords(H.n_axes);
    for (int l = 0; l < H.n_axes; ++l) {
      for (int i = 0; i <= opt.cells; ++i) coords[l].push_back(s[l] - r + 2.0 * r * i / opt.cells);
    }
    const FieldSampler sampler(Grid::from_coords(coords), H, H.ambient_dim);
    std::vector<double> logs(opt.replicas);
    parallel_for(static_cast<std::size_t>(opt.replicas), opt.workers, [&](std::size_t i) {
      const OscillationRecord rec = oscillation_stats(sampler.sample(stream(opt.seed, k, i)), s, {r});
      logs[i] = std::log(rec.sup_osc[0]);
    });
    double sum = 0.0, sum2 = 0.0;
    for (double v : logs) {
      sum += v;
      sum2 += v * v;
    }
    const double n = opt.replicas;
    const double mean = sum / n;
    const double var = std::max(sum2 / n - mean * mean, 0.0) * n / (n - 1.0);
    out.values.push_back(std::exp(mean));
    out.spread.push_back(std::sqrt(var / n));
    lx.push_back(std::log(r));
    ly.push_back(mean);
  }
  out.fit = fit_line(lx, ly);
  return out;
}

ScalingSeries max_local_time_scaling(const HurstVector& H, const Point& s, const std::vector<double>& radii,
                                     double width_factor, const ReplicaOptions& opt) {
  check_series(H, s, radii, opt);
  if (!(width_factor > 0.0)) throw DomainError("scaling: width factor must be positive");
  const double h1 = H.min_h();
  ScalingSeries out;
  out.statistic = "median";
  out.radii = radii;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double r = radii[k];
    const Box T = centred(s, r);
    const Grid grid = Grid::midpoint(T, std::vector<int>(H.n_axes, opt.cells));
    const FieldSampler sampler(grid, H, H.ambient_dim);
    LatticeSpec spec;
    spec.width = width_factor * std::pow(2.0 * r / opt.cells, h1);
    std::vector<double> v(opt.replicas);
    parallel_for(static_cast<std::size_t>(opt.replicas), opt.workers, [&](std::size_t i) {
      v[i] = max_local_time(occupation_histogram(sampler.sample(stream(opt.seed, k, i)), T, spec)).value;
    });
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    out.values.push_back(v[n / 2]);
    out.spread.push_back(v[(3 * n) / 4] - v[n / 4]);
  }
  out.fit = fit_exponent(out.radii, out.values);
  return out;
}

BoxDimensionSummary box_dimension_average(const HurstVector& H, const Box& T, const std::vector<double>& x,
                                          const std::vector<int>& levels, const ReplicaOptions& opt) {
  validate_box(T, true);
  if (T.dim() != static_cast<std::size_t>(H.n_axes)) throw ArityError("box dimension: T needs N axes");
  if (opt.replicas < 1) throw DomainError("box dimension: need at least one replica");
  std::vector<std::vector<double>> coords(H.n_axes);
  for (int l = 0; l < H.n_axes; ++l) {
    for (int i = 0; i <= opt.cells; ++i) {
      coords[l].push_back(T.lower[l] + (T.upper[l] - T.lower[l]) * i / opt.cells);
    }
  }
  const FieldSampler sampler(Grid::from_coords(coords), H, H.ambient_dim);
  BoxDimensionSummary out;
  const std::size_t batch = static_cast<std::size_t>(opt.replicas);
  // Batches keep the accepted set independent of the worker count.
  for (std::size_t round = 0; round < 4 && out.used < opt.replicas; ++round) {
    std::vector<double> dim(batch, std::nan(""));
    parallel_for(batch, opt.workers, [&](std::size_t i) {
      const BoxCount bc = box_counting(sampler.sample(stream(opt.seed, round, i)), x, levels);
      if (std::find(bc.counts.begin(), bc.counts.end(), 0.0) == bc.counts.end()) dim[i] = bc.dimension;
    });
    for (std::size_t i = 0; i < batch && out.used < opt.replicas; ++i) {
      ++out.drawn;
      if (std::isnan(dim[i])) continue;
      out.per_replica.push_back(dim[i]);
      ++out.used;
    }
  }
  if (out.used < 2) throw DegenerateInputError("box dimension: level set missed the box in almost every replica");
  double sum = 0.0, sum2 = 0.0;
  for (double v : out.per_replica) {
    sum += v;
    sum2 += v * v;
  }
  out.mean = sum / out.used;
  out.sd = std::sqrt(std::max(sum2 / out.used - out.mean * out.mean, 0.0) * out.used / (out.used - 1.0));
  return out;
}

}  // namespace fbs
