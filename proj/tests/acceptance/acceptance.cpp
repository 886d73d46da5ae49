// Acceptance checks. One line per criterion:
//   criterion <k>: PASS|FAIL <measured values>
// Exit status is 0 when every selected criterion passes.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fbs/analytic.h"
#include "fbs/errors.h"
#include "fbs/gaussian_engine.h"
#include "fbs/harness/config.h"
#include "fbs/harness/report.h"
#include "fbs/harness/run.h"
#include "fbs/harness/suites.h"
#include "fbs/local_time.h"
#include "fbs/parallel.h"
#include "fbs/scaling.h"

using namespace fbs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Settings {
  std::string work_dir = "acceptance_work";
  int workers = 1;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome suite_criterion(const std::string& name, double budget_s, const Settings& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const harness::SuiteResult r = harness::run_suite(name, 0, 0, s.workers);
  const double secs = seconds_since(t0);
  std::string worst;
  for (const auto& v : r.verdicts) {
    if (v.asserted && !v.pass) worst += " failed=" + v.check_id;
  }
  std::size_t asserted = 0;
  for (const auto& v : r.verdicts) asserted += v.asserted ? 1 : 0;
  return {r.pass() && secs < budget_s,
          fmt("%s suite: %zu asserted checks, %zu failed, %.1fs (budget %.0fs)", name.c_str(), asserted, r.failed(),
              secs, budget_s) +
              worst};
}

// n = 1 moment for Brownian motion on [1, 2] at x = 0.
Outcome criterion4(const Settings& s) {
  const HurstVector H = validate_hurst({0.5}, 1);
  const Box T{{1.0}, {2.0}};
  const int m = 1024, reps = 10000;
  const double w = 0.125;
  const Grid g = Grid::midpoint(T, {m});
  const FieldSampler sampler(g, H, 1);
  std::vector<double> est(reps);
  parallel_for(est.size(), s.workers, [&](std::size_t i) {
    est[i] = local_time_box(sampler.sample(SeedSpec{harness::derive_seed(4, 0, 0), i}), T, {0.0}, w);
  });
  double mean = 0.0, m2 = 0.0;
  for (double v : est) mean += v / reps;
  for (double v : est) m2 += (v - mean) * (v - mean);
  const double se = std::sqrt(m2 / (reps - 1) / reps);
  const double target = std::sqrt(2.0 / std::numbers::pi) * (std::sqrt(2.0) - 1.0);
  // The estimator's own expectation differs from E L by the bin/grid bias,
  // which is computed exactly rather than guessed.
  const double allowance = std::fabs(histogram_expectation(g, T, H, {0.0}, w) - target);
  const double dev = std::fabs(mean - target);
  return {dev <= 4.0 * se + allowance,
          fmt("mean=%.6f target=%.6f |diff|=%.2e 4se=%.2e discretization=%.2e (m=%d, w=%.3f, %d replicas)", mean,
              target, dev, 4.0 * se, allowance, m, w, reps)};
}

Outcome criterion5(const Settings& s) {
  bool ok = true;
  std::string detail;
  const std::vector<double> radii = {0.5, 0.25, 0.125, 0.0625, 0.03125};
  int k = 0;
  for (const std::vector<double>& h : {std::vector<double>{0.4, 0.6}, std::vector<double>{0.5, 0.5}}) {
    const HurstVector H = validate_hurst(h, 1);
    const double beta = beta_and_dim(H, 1).beta_tau;
    ScalingMcOptions o;
    o.cells = 128;
    o.bin_width = 0.02;
    o.replicas = 2000;
    o.anchored = true;
    o.seed = SeedSpec{harness::derive_seed(5, k++, harness::kScalingFirst), 0};
    o.workers = s.workers;
    const ScalingFit f = moment_scaling_mc({0.0}, {1.0, 1.0}, H, 1, radii, o);
    const bool pass = std::fabs(f.fit.slope - beta) <= 0.15;
    ok = ok && pass;
    detail += fmt("moment H=(%.1f,%.1f) slope=%.3f beta=%.2f%s; ", h[0], h[1], f.fit.slope, beta, pass ? "" : " OUT");
  }
  {
    const HurstVector H = validate_hurst({0.5, 0.5}, 1);
    ReplicaOptions o;
    o.cells = 128;
    o.replicas = 200;
    o.seed = SeedSpec{harness::derive_seed(5, 2, harness::kMaxLocalTime), 0};
    o.workers = s.workers;
    std::vector<double> r;
    for (int j = 0; j < 6; ++j) r.push_back(0.25 / std::pow(2.0, j));
    const ScalingSeries m = max_local_time_scaling(H, {1.5, 1.5}, r, 4.0, o);
    const bool pass = std::fabs(m.fit.slope - 1.5) <= 0.2;
    ok = ok && pass;
    detail += fmt("max-local-time slope=%.3f target=1.50%s; ", m.fit.slope, pass ? "" : " OUT");
  }
  k = 0;
  for (const std::vector<double>& h : {std::vector<double>{0.4, 0.6}, std::vector<double>{0.5, 0.5}}) {
    const HurstVector H = validate_hurst(h, 1);
    ReplicaOptions o;
    o.cells = 64;
    o.replicas = 200;
    o.seed = SeedSpec{harness::derive_seed(5, 3 + k++, harness::kOscillation), 0};
    o.workers = s.workers;
    std::vector<double> r;
    for (int j = 0; j < 8; ++j) r.push_back(0.25 / std::pow(2.0, j));
    const ScalingSeries os = oscillation_scaling(H, {1.5, 1.5}, r, o);
    const double h1 = H.sorted()[0];
    const bool pass = std::fabs(os.fit.slope - h1) <= 0.1;
    ok = ok && pass;
    detail += fmt("oscillation H=(%.1f,%.1f) slope=%.3f target=%.2f%s; ", h[0], h[1], os.fit.slope, h1,
                  pass ? "" : " OUT");
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome criterion6(const Settings&) {
  // Inadmissible: H d = 1.2 >= 1. Truncated integrals must keep growing and the
  // increments must not shrink as the diagonal tube narrows.
  const Box T{{1.0}, {2.0}};
  const HurstVector bad = validate_hurst({0.6}, 2);
  std::vector<double> vals;
  bool flagged = true;
  double power = 0.0;
  for (double tube : {1e-1, 1e-2, 1e-3, 1e-4}) {
    MomentOptions o;
    o.tube = tube;
    o.tol = 1e-6;
    const MomentReport m = exact_moment({0.0, 0.0}, T, bad, 2, o);
    vals.push_back(m.truncated);
    flagged = flagged && !m.converged;
    power = m.local_power;
  }
  bool growing = true;
  for (std::size_t i = 1; i < vals.size(); ++i) growing = growing && vals[i] > vals[i - 1];
  for (std::size_t i = 2; i < vals.size(); ++i) growing = growing && vals[i] - vals[i - 1] >= vals[i - 1] - vals[i - 2];
  bool auto_refuses = false;
  try {
    exact_moment({0.0, 0.0}, T, bad, 2);
  } catch (const NumericalError&) {
    auto_refuses = true;
  }

  // Admissible: H d = 0.6 < 1.
  const HurstVector good = validate_hurst({0.6}, 1);
  std::vector<double> totals;
  for (double tube : {1e-2, 1e-3, 1e-4, 1e-5}) {
    MomentOptions o;
    o.tube = tube;
    o.tol = 1e-8;
    totals.push_back(exact_moment({0.0}, T, good, 2, o).value);
  }
  MomentOptions o;
  o.tol = 1e-6;
  const MomentReport conv = exact_moment({0.0}, T, good, 2, o);
  const double spread = std::fabs(totals.back() - totals[totals.size() - 2]) / totals.back();
  const bool converges = conv.converged && conv.local_power < 1.0 && spread < 1e-4 &&
                         std::fabs(conv.value - totals.back()) <= 1e-4 * conv.value;

  return {growing && flagged && auto_refuses && converges,
          fmt("d=2: truncated %.4f %.4f %.4f %.4f (tube 1e-1..1e-4), local power %.3f, flagged=%d, auto refuses=%d; "
              "d=1: E L^2=%.8f local power %.3f, last tube change %.1e",
              vals[0], vals[1], vals[2], vals[3], power, flagged, auto_refuses, conv.value, conv.local_power,
              spread)};
}

Outcome criterion7(const Settings& s) {
  const HurstVector H = validate_hurst({0.4, 0.6}, 1);
  ReplicaOptions o;
  o.cells = 1024;
  o.replicas = 50;
  o.seed = SeedSpec{harness::derive_seed(7, 0, harness::kBoxDimension), 0};
  o.workers = s.workers;
  const BoxDimensionSummary b = box_dimension_average(H, Box{{1.0, 1.0}, {2.0, 2.0}}, {0.0}, {3, 4, 5, 6}, o);
  return {b.used == 50 && std::fabs(b.mean - 1.6) <= 0.3,
          fmt("mean box-counting slope=%.3f (sd %.3f, %d replicas used of %d drawn), target 1.6 +- 0.3", b.mean, b.sd,
              b.used, b.drawn)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Every file under a, except timing.json, has a byte-identical twin under b.
bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
  files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file() || e.path().filename() == "timing.json") continue;
    const fs::path twin = b / fs::relative(e.path(), a);
    if (!fs::exists(twin) || slurp(e.path()) != slurp(twin)) return false;
    ++files;
  }
  return files > 0;
}

Outcome criterion8(const Settings& s) {
  std::string text;
  for (const auto& id : harness::builtin_ids()) text += harness::builtin_config_text(id);
  // Both built-ins in one run; the second "run.scenarios" line is replaced.
  std::string merged;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("run.scenarios", 0) == 0) continue;
    if (line.find(".replicas") != std::string::npos) line = line.substr(0, line.find('=')) + "= 60";
    merged += line + "\n";
  }
  merged += "run.master_seed = 8\nrun.scenarios = ";
  for (const auto& id : harness::builtin_ids()) merged += id + (id == harness::builtin_ids().back() ? "\n" : ", ");
  harness::RunConfig cfg = harness::parse_run_config(harness::parse_key_values(merged, "acceptance"));

  const fs::path root = fs::path(s.work_dir) / "criterion8";
  fs::remove_all(root);
  std::vector<fs::path> dirs;
  bool mass_ok = true;
  std::size_t mass_checked = 0;
  for (int workers : {1, 1, 3}) {
    cfg.workers = workers;
    dirs.push_back(root / ("run" + std::to_string(dirs.size()) + "_w" + std::to_string(workers)));
    const harness::RunReport r = harness::run(cfg, dirs.back().string());
    for (const auto& sc : r.scenarios) {
      for (const auto& v : sc.verdicts) {
        if (v.check_id == "mass_conservation") {
          mass_ok = mass_ok && v.pass;
          ++mass_checked;
        }
      }
    }
  }
  std::size_t f1 = 0, f2 = 0;
  const bool rerun = same_tree(dirs[0], dirs[1], f1);
  const bool workers = same_tree(dirs[0], dirs[2], f2);

  // Conservation on extra samples over several shapes, fixed and sample windows.
  double worst = 0.0;
  std::size_t samples = 0;
  const std::vector<std::pair<std::vector<double>, int>> shapes = {
      {{0.5}, 1}, {{0.3}, 2}, {{0.5, 0.5}, 1}, {{0.4, 0.6}, 2}, {{0.2, 0.5, 0.8}, 1}};
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    const HurstVector H = validate_hurst(shapes[k].first, shapes[k].second);
    const Box T{std::vector<double>(H.n_axes, 1.0), std::vector<double>(H.n_axes, 2.0)};
    const FieldSampler sampler(Grid::midpoint(T, std::vector<int>(H.n_axes, H.n_axes == 3 ? 8 : 24)), H, H.ambient_dim);
    for (std::uint64_t rep = 0; rep < 40; ++rep) {
      const FieldSample f = sampler.sample(SeedSpec{harness::derive_seed(8, k, harness::kReplicas), rep});
      LatticeSpec spec;
      spec.width = rep % 2 ? 0.05 : 0.3;
      if (rep % 4 == 3) {
        spec.window_from_sample = false;
        spec.lower.assign(H.ambient_dim, -0.2);
        spec.bins.assign(H.ambient_dim, 6);
      }
      const LocalTimeField lt = occupation_histogram(f, T, spec);
      worst = std::max(worst, std::fabs(lt.recovered_mass() - lt.time_mass) / lt.time_mass);
      ++samples;
    }
  }
  mass_ok = mass_ok && worst <= 1e-12;
  return {rerun && workers && mass_ok,
          fmt("re-run identical=%d (%zu files), workers 1 vs 3 identical=%d (%zu files), mass conservation: "
              "%zu run verdicts pass=%d, %zu extra samples worst relative error %.1e",
              rerun, f1, workers, f2, mass_checked, mass_ok, samples, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  Settings s;
  app.add_option("--criterion", only, "criterion number 1-8; 0 runs all")->check(CLI::Range(0, 8));
  app.add_option("--work-dir", s.work_dir, "scratch directory for run outputs");
  app.add_option("--workers", s.workers, "worker threads")->check(CLI::Range(1, 256));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria = {
      [&] { return suite_criterion("identities", 60.0, s); },
      [&] { return suite_criterion("inequalities", 300.0, s); },
      [&] { return suite_criterion("arithmetic", 60.0, s); },
      [&] { return criterion4(s); },
      [&] { return criterion5(s); },
      [&] { return criterion6(s); },
      [&] { return criterion7(s); },
      [&] { return criterion8(s); },
  };
  bool all = true;
  for (int k = 1; k <= 8; ++k) {
    if (only != 0 && only != k) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << " " << o.detail
              << fmt(" [%.1fs]", seconds_since(t0)) << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
