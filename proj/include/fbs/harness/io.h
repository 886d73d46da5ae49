#pragma once

#include <string>
#include <vector>

#include "fbs/gaussian_engine.h"
#include "fbs/harness/report.h"
#include "fbs/local_time.h"

namespace fbs::harness {

// Doubles in CSV are written with 17 significant digits (exact round trip).
std::string csv_number(double v);

void write_text(const std::string& path, const std::string& text);
void ensure_dir(const std::string& path);

// Columns t_1..t_N, B_1..B_d; one row per grid node in row-major order.
void write_field_csv(const std::string& path, const FieldSample& s);
json field_sidecar(const FieldSample& s);

// Columns x_1..x_d, value, mass; one row per bin.
void write_localtime_csv(const std::string& path, const LocalTimeField& f);
json localtime_sidecar(const LocalTimeField& f, double exact_tol);

// Columns series, r, value, spread.
void write_scaling_csv(const std::string& path, const std::vector<FitRecord>& fits);

struct Pairs {
  std::vector<double> r;
  std::vector<double> value;
  std::vector<double> weight;  // empty when the file has no weight column
};

// Reads columns r and value (and weight when present) from a CSV with a header
// row. With `series` nonempty only rows whose series column matches are kept.
Pairs read_pairs_csv(const std::string& path, const std::string& series);

}  // namespace fbs::harness
