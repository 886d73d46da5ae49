#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fbs/hurst.h"

namespace fbs::harness {

// Flat "dotted.key = value" text. '#' starts a comment; blank lines are ignored.
// Duplicate keys are an error so a config cannot silently override itself.
struct KeyValues {
  std::map<std::string, std::string> entries;
  std::map<std::string, int> line_of;
  std::string source;  // file name for messages
};

KeyValues parse_key_values(const std::string& text, const std::string& source);
KeyValues load_key_values(const std::string& path);

struct Tolerances {
  double quadrature = 1e-8;  // relative target for every quadrature
  double exact = 1e-12;      // relative slack for exact bookkeeping (mass, bin indicator)
};

struct ExperimentConfig {
  std::string id;
  std::vector<double> hurst;    // stored order
  int n_axes = 0;
  int d = 1;
  Box interval;
  std::vector<int> cells;       // per axis
  double bin_width = 0.0;       // resolved; the "auto" setting derives it from the grid
  bool bin_width_auto = true;
  std::vector<double> level;    // x, d coordinates
  int replicas = 20;
  std::vector<double> radii;    // scaling radii for boxes anchored at interval.lower
  int scaling_cells = 64;
  double scaling_bin_width = 0.02;  // expectation-level fits; no resolution coupling
  int verify_configs = 200;     // randomized configurations per inequality in `verify`
  Tolerances tol;

  HurstVector hurst_vector() const;
  // Largest time step of the sampling grid.
  double grid_step() const;
};

struct RunConfig {
  std::uint64_t master_seed = 1;
  int workers = 1;
  std::string output_dir = "fbslab-out";
  std::vector<ExperimentConfig> scenarios;
};

// Validates every field before anything is computed; errors name the key.
RunConfig parse_run_config(const KeyValues& kv);
RunConfig load_run_config(const std::string& path);

// Built-in scenarios by id; throws ConfigError for unknown ids.
std::string builtin_config_text(const std::string& id);
std::vector<std::string> builtin_ids();

// Output directory after the environment override (FBSLAB_OUT_DIR).
std::string resolve_output_dir(const std::string& configured);

}  // namespace fbs::harness
