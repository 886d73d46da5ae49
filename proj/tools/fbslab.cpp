// fbslab: command-line front end for simulation, local-time estimation,
// exponent arithmetic, verification suites, moments and fits.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "fbs/analytic.h"
#include "fbs/errors.h"
#include "fbs/exponents.h"
#include "fbs/gaussian_engine.h"
#include "fbs/harness/config.h"
#include "fbs/harness/io.h"
#include "fbs/harness/report.h"
#include "fbs/harness/run.h"
#include "fbs/harness/suites.h"
#include "fbs/local_time.h"
#include "fbs/parallel.h"
#include "fbs/regression.h"

using namespace fbs;
using namespace fbs::harness;

namespace {

constexpr int kOk = 0;
constexpr int kAssertFailed = 1;
constexpr int kUsage = 2;
constexpr int kNumerical = 3;
constexpr int kIo = 4;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> replicas;
  std::optional<int> workers;
  bool json = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "config file, or builtin:<id> for a bundled scenario");
  sub->add_option("--seed", c.seed, "master seed (overrides run.master_seed)");
  sub->add_option("--out", c.out, "output directory (overrides FBSLAB_OUT_DIR and run.output_dir)");
  sub->add_option("--replicas", c.replicas, "replicas per scenario")->check(CLI::PositiveNumber);
  sub->add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1, 256));
  sub->add_flag("--json", c.json, "print a JSON document on stdout");
}

struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& m) : std::runtime_error(m) {}
};

RunConfig load_config(const Common& c) {
  RunConfig cfg;
  const std::string prefix = "builtin:";
  if (c.config.rfind(prefix, 0) == 0) {
    const std::string id = c.config.substr(prefix.size());
    cfg = parse_run_config(parse_key_values(builtin_config_text(id), c.config));
  } else {
    cfg = load_run_config(c.config);
  }
  if (c.seed) cfg.master_seed = *c.seed;
  if (c.workers) cfg.workers = *c.workers;
  if (c.replicas) {
    for (auto& s : cfg.scenarios) s.replicas = *c.replicas;
  }
  cfg.output_dir = c.out.empty() ? resolve_output_dir(cfg.output_dir) : c.out;
  return cfg;
}

void require_config(const Common& c, CLI::App* sub) {
  if (c.config.empty()) {
    std::cerr << "error: --config is required for '" << sub->get_name() << "'\n\n" << sub->help();
    throw UsageError("");
  }
}

void print(const json& j) { std::cout << dump(j); }

// Replica i of scenario k, identical to the sample behind the run artifacts.
FieldSample replica(const FieldSampler& s, const RunConfig& cfg, std::size_t k, std::size_t i) {
  return s.sample(SeedSpec{derive_seed(cfg.master_seed, k, kReplicas), i});
}

// "<dir>/<stem>_0007" without extension.
std::string numbered(const std::string& dir, const char* stem, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04d", stem, i);
  return dir + "/" + buf;
}

int cmd_sample(const Common& c, bool localtime, int default_replicas) {
  const RunConfig cfg = load_config(c);
  json files = json::array();
  for (std::size_t k = 0; k < cfg.scenarios.size(); ++k) {
    const ExperimentConfig& e = cfg.scenarios[k];
    const int reps = c.replicas ? *c.replicas : default_replicas;
    const FieldSampler sampler(Grid::midpoint(e.interval, e.cells), e.hurst_vector(), e.d);
    const std::string dir = (std::filesystem::path(cfg.output_dir) / e.id).string();
    ensure_dir(dir);
    for (int i = 0; i < reps; ++i) {
      const FieldSample s = replica(sampler, cfg, k, static_cast<std::size_t>(i));
      if (localtime) {
        LatticeSpec lat;
        lat.width = e.bin_width;
        lat.anchor = e.level;
        const LocalTimeField f = occupation_histogram(s, e.interval, lat);
        const std::string base = numbered(dir, "localtime", i) + ".";
        write_localtime_csv(base + "csv", f);
        write_text(base + "json", dump(localtime_sidecar(f, e.tol.exact)));
        files.push_back(base + "csv");
      } else {
        const std::string base = numbered(dir, "field", i) + ".";
        write_field_csv(base + "csv", s);
        write_text(base + "json", dump(field_sidecar(s)));
        files.push_back(base + "csv");
      }
    }
  }
  if (c.json) {
    print(json{{"schema_version", kSchemaVersion}, {"kind", localtime ? "localtime-files" : "field-files"}, {"files", files}});
  } else {
    for (const auto& f : files) std::cout << f.get<std::string>() << "\n";
  }
  return kOk;
}

int cmd_exponents(const std::vector<double>& h, int d, std::optional<double> q, std::optional<double> delta,
                  double rho) {
  const HurstVector H = validate_hurst(h, d);
  const ExponentProfile p = beta_and_dim(H, d);
  const double qq = q ? *q : d;
  const double dl = delta ? *delta : 0.5 * std::min(1.0, delta_threshold(H, qq));
  const HolderWeights w = construct_weights(H, qq, dl, rho);
  json j = to_json(p);
  j["weights"] = to_json(w);
  j["H"] = h;
  j["d"] = d;
  j["schema_version"] = kSchemaVersion;
  print(j);
  return kOk;
}

int cmd_verify(const Common& c, const std::string& suite, int configs) {
  std::vector<SuiteResult> results;
  const std::uint64_t base = c.seed ? *c.seed : 0;
  const int workers = c.workers ? *c.workers : 1;
  const std::vector<std::string> names =
      suite == "all" ? std::vector<std::string>{"identities", "inequalities", "arithmetic"} : std::vector<std::string>{suite};
  for (std::size_t k = 0; k < names.size(); ++k) {
    // Seed 0 keeps each suite's documented default seed.
    results.push_back(run_suite(names[k], base == 0 ? 0 : base + k, configs, workers));
  }
  if (!c.config.empty()) {
    const RunConfig cfg = load_config(c);
    for (std::size_t k = 0; k < cfg.scenarios.size(); ++k) {
      const ExperimentConfig& e = cfg.scenarios[k];
      ScenarioCheckOptions so;
      so.configs = configs > 0 ? configs : e.verify_configs;
      so.quad_tol = e.tol.quadrature;
      so.seed = derive_seed(cfg.master_seed, k, kVerify);
      so.workers = cfg.workers;
      SuiteResult r = scenario_checks(e.hurst_vector(), e.d, e.interval, so);
      r.name = "scenario:" + e.id;
      results.push_back(std::move(r));
    }
  }
  std::size_t failed = 0;
  json arr = json::array();
  for (const auto& r : results) {
    failed += r.failed();
    arr.push_back(to_json(r));
  }
  if (c.json) {
    print(json{{"schema_version", kSchemaVersion}, {"kind", "verify-report"}, {"suites", arr}, {"failed", failed}});
  } else {
    for (const auto& r : results) {
      for (const auto& v : r.verdicts) {
        std::printf("%-14s %-28s %-6s lhs=%.6g rhs=%.6g slack=%.3g\n", r.name.c_str(), v.check_id.c_str(),
                    v.asserted ? (v.pass ? "pass" : "FAIL") : "report", v.lhs, v.rhs, v.slack);
      }
    }
    std::printf("failed assertions: %zu\n", failed);
  }
  return failed == 0 ? kOk : kAssertFailed;
}

int cmd_moments(const Common& c) {
  const RunConfig cfg = load_config(c);
  json out = json::array();
  for (std::size_t k = 0; k < cfg.scenarios.size(); ++k) {
    const ExperimentConfig& e = cfg.scenarios[k];
    const HurstVector H = e.hurst_vector();
    const Grid grid = Grid::midpoint(e.interval, e.cells);
    const FieldSampler sampler(grid, H, e.d);
    std::vector<double> l(static_cast<std::size_t>(e.replicas));
    parallel_for(l.size(), cfg.workers, [&](std::size_t i) {
      l[i] = local_time_box(replica(sampler, cfg, k, i), e.interval, e.level, e.bin_width);
    });
    json mom = json::array();
    for (int n = 1; n <= 2 && n * H.n_axes <= 6; ++n) {
      MomentOptions mo;
      mo.tol = e.tol.quadrature;
      mo.seed = derive_seed(cfg.master_seed, k, kMomentMc);
      const MomentReport m = exact_moment(e.level, e.interval, H, n, mo);
      double s = 0.0, s2 = 0.0;
      for (double v : l) {
        s += std::pow(v, n);
        s2 += std::pow(v, 2 * n);
      }
      const double R = static_cast<double>(l.size());
      const double mean = s / R;
      const double se = R > 1 ? std::sqrt(std::max(s2 / R - mean * mean, 0.0) / (R - 1.0)) : 0.0;
      json j = to_json(m);
      j["monte_carlo"] = {{"replicas", l.size()}, {"mean", mean}, {"standard_error", se}};
      if (n == 1) j["estimator_expectation"] = histogram_expectation(grid, e.interval, H, e.level, e.bin_width);
      mom.push_back(j);
    }
    out.push_back(json{{"id", e.id}, {"moments", mom}});
  }
  const json doc{{"schema_version", kSchemaVersion}, {"kind", "moments"}, {"master_seed", cfg.master_seed}, {"scenarios", out}};
  if (c.json) {
    print(doc);
  } else {
    for (const auto& s : out) {
      for (const auto& m : s["moments"]) {
        std::printf("%s n=%d exact=%.8g (%s, err %.2g) mc=%.8g se=%.2g\n", s["id"].get<std::string>().c_str(),
                    m["n"].get<int>(), m["value"].get<double>(), m["method"].get<std::string>().c_str(),
                    m["error"].get<double>(), m["monte_carlo"]["mean"].get<double>(),
                    m["monte_carlo"]["standard_error"].get<double>());
      }
    }
  }
  return kOk;
}

int cmd_fit(const Common& c, const std::string& input, const std::string& series) {
  const Pairs p = read_pairs_csv(input, series);
  const FitResult f = fit_exponent(p.r, p.value, p.weight);
  if (c.json) {
    print(json{{"schema_version", kSchemaVersion},
               {"kind", "fit"},
               {"input", input},
               {"series", series},
               {"points", p.r.size()},
               {"slope", f.slope},
               {"intercept", f.intercept},
               {"stderr", f.stderr_}});
  } else {
    std::printf("slope=%.10g intercept=%.10g stderr=%.3g points=%zu\n", f.slope, f.intercept, f.stderr_, p.r.size());
  }
  return kOk;
}

int cmd_run(const Common& c) {
  const RunConfig cfg = load_config(c);
  RunOptions opt;
  opt.progress = &std::cerr;
  const RunReport r = run(cfg, cfg.output_dir, opt);
  if (c.json) {
    print(to_json(r));
  } else {
    for (const auto& s : r.scenarios) {
      for (const auto& v : s.verdicts) {
        if (v.asserted) std::printf("%-26s %-26s %s\n", s.id.c_str(), v.check_id.c_str(), v.pass ? "pass" : "FAIL");
      }
    }
    std::printf("asserted: %zu  failed: %zu  report: %s/report.json\n", r.asserted(), r.failed(), cfg.output_dir.c_str());
  }
  return r.pass() ? kOk : kAssertFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fbslab: fractional Brownian sheet simulation and verification lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Common common;
  auto* sim = app.add_subcommand("simulate", "write field samples as CSV with JSON sidecars");
  auto* lt = app.add_subcommand("localtime", "write histogram local-time fields as CSV with JSON sidecars");
  auto* ex = app.add_subcommand("exponents", "print the exponent profile and Holder weights as JSON");
  auto* ver = app.add_subcommand("verify", "run the identity, inequality and arithmetic suites");
  auto* mom = app.add_subcommand("moments", "exact and Monte Carlo local-time moments");
  auto* fit = app.add_subcommand("fit", "log-log regression over a CSV of (r, value) pairs");
  auto* rn = app.add_subcommand("run", "full scenario pipeline with report.json and artifacts");
  for (auto* s : {sim, lt, ex, ver, mom, fit, rn}) add_common(s, common);

  std::vector<double> h;
  int d = 1;
  std::optional<double> q, delta;
  double rho = -1.0;
  ex->add_option("--H", h, "Hurst indices, comma separated")->delimiter(',')->required();
  ex->add_option("--d", d, "ambient dimension")->check(CLI::PositiveNumber);
  ex->add_option("--q", q, "weight construction level (default d)");
  ex->add_option("--delta", delta, "delta below delta_tau (default half of min(1, delta_tau))");
  ex->add_option("--rho", rho, "free parameter; negative selects the default");

  std::string suite = "all";
  int configs = 0;
  ver->add_option("--suite", suite, "identities, inequalities, arithmetic or all")
      ->check(CLI::IsMember({"identities", "inequalities", "arithmetic", "all"}));
  ver->add_option("--configs", configs, "randomized configurations per check (0 keeps defaults)")
      ->check(CLI::NonNegativeNumber);

  std::string input, series;
  fit->add_option("--input", input, "CSV with header columns r, value and optional weight, series")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--series", series, "keep only rows of this series");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) {
      require_config(common, sim);
      return cmd_sample(common, false, 1);
    }
    if (*lt) {
      require_config(common, lt);
      return cmd_sample(common, true, 1);
    }
    if (*ex) return cmd_exponents(h, d, q, delta, rho);
    if (*ver) return cmd_verify(common, suite, configs);
    if (*mom) {
      require_config(common, mom);
      return cmd_moments(common);
    }
    if (*fit) return cmd_fit(common, input, series);
    if (*rn) {
      require_config(common, rn);
      return cmd_run(common);
    }
  } catch (const UsageError& e) {
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    // Domain, arity and degenerate-input errors from user-supplied values.
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}
