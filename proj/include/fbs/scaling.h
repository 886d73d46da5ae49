#pragma once

#include <string>
#include <vector>

#include "fbs/hurst.h"
#include "fbs/random.h"
#include "fbs/regression.h"

namespace fbs {

// Replica statistic per radius with a log-log fit.
struct ScalingSeries {
  std::string statistic;       // "mean-log" or "median"
  std::vector<double> radii;
  std::vector<double> values;  // exp(mean log) or median, per radius
  std::vector<double> spread;  // standard error of mean log, or interquartile range
  FitResult fit;
};

struct ReplicaOptions {
  int cells = 64;
  int replicas = 200;
  SeedSpec seed{};
  int workers = 1;
};

// Each radius gets its own grid of `cells` intervals per axis on [s - r, s + r],
// so every radius is resolved equally well. Fits mean log sup-oscillation.
ScalingSeries oscillation_scaling(const HurstVector& H, const Point& s, const std::vector<double>& radii,
                                  const ReplicaOptions& opt);

// Median of the histogram maximum L*([s - r, s + r]^N) over replicas, with the
// bin width tied to the grid as w = width_factor * (2r / cells)^{H_1}.
ScalingSeries max_local_time_scaling(const HurstVector& H, const Point& s, const std::vector<double>& radii,
                                     double width_factor, const ReplicaOptions& opt);

struct BoxDimensionSummary {
  double mean = 0.0;
  double sd = 0.0;
  int used = 0;     // replicas whose level set met every box scale
  int drawn = 0;    // replicas drawn to reach `used`
  std::vector<double> per_replica;
};

// Average box-counting slope of {t in T : B(t) = x} over replicas on a uniform
// grid with `cells` intervals per axis. Replicas in which the level set misses
// the box at some scale are skipped and redrawn, up to 4x the request.
BoxDimensionSummary box_dimension_average(const HurstVector& H, const Box& T, const std::vector<double>& x,
                                          const std::vector<int>& levels, const ReplicaOptions& opt);

}  // namespace fbs
