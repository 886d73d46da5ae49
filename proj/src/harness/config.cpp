#include "fbs/harness/config.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "fbs/errors.h"
#include "fbs/exponents.h"

namespace fbs::harness {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Typed access with the key path in every message.
class Reader {
 public:
  Reader(const KeyValues& kv, std::string prefix) : kv_(kv), prefix_(std::move(prefix)) {}

  bool has(const std::string& key) const { return kv_.entries.count(prefix_ + key) > 0; }

  std::string raw(const std::string& key) const {
    used_.insert(prefix_ + key);
    return kv_.entries.at(prefix_ + key);
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    const std::string full = prefix_ + key;
    std::string where = kv_.source;
    auto it = kv_.line_of.find(full);
    if (it != kv_.line_of.end()) where += ":" + std::to_string(it->second);
    throw ConfigError(where + ": " + full + ": " + why);
  }

  double number(const std::string& key, const std::string& text) const {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
      fail(key, "'" + text + "' is not a finite number");
    }
    return v;
  }

  double real(const std::string& key, double fallback) const {
    return has(key) ? number(key, raw(key)) : fallback;
  }

  long long integer(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const std::string t = raw(key);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || *end != '\0' || errno == ERANGE) fail(key, "'" + t + "' is not an integer");
    return v;
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string t = raw(key);
    errno = 0;
    char* end = nullptr;
    if (!t.empty() && t[0] == '-') fail(key, "must be nonnegative");
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (t.empty() || *end != '\0' || errno == ERANGE) fail(key, "'" + t + "' is not an unsigned integer");
    return v;
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(raw(key))) out.push_back(number(key, item));
    if (out.empty()) fail(key, "empty list");
    return out;
  }

  // A list, or a single value broadcast to `n` entries.
  std::vector<double> per_axis(const std::string& key, int n) const {
    std::vector<double> v = reals(key);
    if (v.size() == 1 && n > 1) v.assign(n, v[0]);
    if (static_cast<int>(v.size()) != n) {
      fail(key, "expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
    }
    return v;
  }

  const std::set<std::string>& used() const { return used_; }

 private:
  const KeyValues& kv_;
  std::string prefix_;
  mutable std::set<std::string> used_;
};

ExperimentConfig parse_scenario(const KeyValues& kv, const std::string& id, std::set<std::string>& used) {
  if (id.find('.') != std::string::npos || id.empty()) {
    throw ConfigError(kv.source + ": run.scenarios: scenario id '" + id + "' must be nonempty without dots");
  }
  Reader r(kv, "scenario." + id + ".");
  ExperimentConfig c;
  c.id = id;
  if (!r.has("H")) r.fail("H", "missing");
  const std::vector<double> h = r.reals("H");
  c.n_axes = static_cast<int>(r.integer("N", static_cast<long long>(h.size())));
  if (c.n_axes < 1) r.fail("N", "must be at least 1");
  c.hurst = r.per_axis("H", c.n_axes);
  c.d = static_cast<int>(r.integer("d", 1));
  if (c.d < 1) r.fail("d", "must be at least 1");
  HurstVector H;
  try {
    H = validate_hurst(c.hurst, c.d);
  } catch (const std::exception& e) {
    r.fail("H", e.what());
  }
  if (!(c.d < H.inv_sum())) {
    r.fail("d", "local time needs d < sum 1/H_l = " + std::to_string(H.inv_sum()));
  }

  if (!r.has("interval.lower")) r.fail("interval.lower", "missing");
  if (!r.has("interval.upper")) r.fail("interval.upper", "missing");
  c.interval.lower = r.per_axis("interval.lower", c.n_axes);
  c.interval.upper = r.per_axis("interval.upper", c.n_axes);
  for (int l = 0; l < c.n_axes; ++l) {
    if (!(c.interval.lower[l] > 0.0)) r.fail("interval.lower", "must lie in the open orthant");
    if (!(c.interval.upper[l] > c.interval.lower[l])) r.fail("interval.upper", "must exceed interval.lower");
  }

  if (r.has("grid.cells")) {
    for (double v : r.per_axis("grid.cells", c.n_axes)) {
      if (v != std::floor(v) || v < 2 || v > 4096) r.fail("grid.cells", "must be integers in [2, 4096]");
      c.cells.push_back(static_cast<int>(v));
    }
  } else {
    c.cells.assign(c.n_axes, 64);
  }
  double grid_points = 1.0;
  for (int m : c.cells) grid_points *= m;
  if (grid_points > 4.2e6) r.fail("grid.cells", "grid larger than 2^22 points");

  const double step = c.grid_step();
  const double coupled = 4.0 * std::pow(step, H.min_h());
  const std::string bw = r.has("localtime.bin_width") ? r.raw("localtime.bin_width") : "auto";
  if (bw == "auto") {
    c.bin_width_auto = true;
    c.bin_width = coupled;
  } else {
    c.bin_width_auto = false;
    c.bin_width = r.number("localtime.bin_width", bw);
    if (!(c.bin_width > 0.0)) r.fail("localtime.bin_width", "must be positive");
    if (c.bin_width < coupled * (1.0 - 1e-12)) {
      r.fail("localtime.bin_width", "resolution coupling needs step^H_1 <= width / 4, i.e. width >= " +
                                        std::to_string(coupled) + " for this grid");
    }
  }
  c.level = r.has("localtime.x") ? r.per_axis("localtime.x", c.d) : std::vector<double>(c.d, 0.0);

  c.replicas = static_cast<int>(r.integer("replicas", 20));
  if (c.replicas < 2 || c.replicas > 1000000) r.fail("replicas", "must lie in [2, 1000000]");

  c.scaling_cells = static_cast<int>(r.integer("scaling.cells", 64));
  if (c.scaling_cells < 8 || c.scaling_cells > 1024) r.fail("scaling.cells", "must lie in [8, 1024]");
  c.scaling_bin_width = r.real("scaling.bin_width", 0.02);
  if (!(c.scaling_bin_width > 0.0)) r.fail("scaling.bin_width", "must be positive");
  double span = INFINITY;
  for (int l = 0; l < c.n_axes; ++l) span = std::min(span, c.interval.upper[l] - c.interval.lower[l]);
  if (r.has("scaling.radii")) {
    c.radii = r.reals("scaling.radii");
  } else {
    for (int k = 0; k < 4; ++k) c.radii.push_back(span / (1 << k));
  }
  if (c.radii.size() < 3) r.fail("scaling.radii", "need at least three radii");
  const double rmax = *std::max_element(c.radii.begin(), c.radii.end());
  for (double rad : c.radii) {
    if (!(rad > 0.0) || rad > span * (1.0 + 1e-12)) r.fail("scaling.radii", "radii must lie in (0, shortest side]");
    const double cells = rad / rmax * c.scaling_cells;
    if (std::fabs(cells - std::round(cells)) > 1e-9 * cells) {
      r.fail("scaling.radii", "every radius must be a whole number of scaling cells");
    }
  }

  c.verify_configs = static_cast<int>(r.integer("verify.configs", 200));
  if (c.verify_configs < 1) r.fail("verify.configs", "must be positive");
  c.tol.quadrature = r.real("tolerance.quadrature", 1e-8);
  if (!(c.tol.quadrature >= 1e-13 && c.tol.quadrature <= 1e-3)) {
    r.fail("tolerance.quadrature", "must lie in [1e-13, 1e-3]");
  }
  c.tol.exact = r.real("tolerance.exact", 1e-12);
  if (!(c.tol.exact > 0.0 && c.tol.exact <= 1e-6)) r.fail("tolerance.exact", "must lie in (0, 1e-6]");

  used.insert(r.used().begin(), r.used().end());
  return c;
}

}  // namespace

HurstVector ExperimentConfig::hurst_vector() const { return validate_hurst(hurst, d); }

double ExperimentConfig::grid_step() const {
  double s = 0.0;
  for (int l = 0; l < n_axes; ++l) s = std::max(s, (interval.upper[l] - interval.lower[l]) / cells[l]);
  return s;
}

KeyValues parse_key_values(const std::string& text, const std::string& source) {
  KeyValues kv;
  kv.source = source;
  std::stringstream ss(text);
  std::string line;
  int n = 0;
  while (std::getline(ss, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(n) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key.find_first_of(" \t") != std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(n) + ": malformed key '" + key + "'");
    }
    if (kv.entries.count(key)) {
      throw ConfigError(source + ":" + std::to_string(n) + ": " + key + ": duplicate key (first on line " +
                        std::to_string(kv.line_of[key]) + ")");
    }
    kv.entries[key] = value;
    kv.line_of[key] = n;
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str(), path);
}

RunConfig parse_run_config(const KeyValues& kv) {
  RunConfig rc;
  Reader r(kv, "run.");
  rc.master_seed = r.unsigned64("master_seed", 1);
  rc.workers = static_cast<int>(r.integer("workers", 1));
  if (rc.workers < 1 || rc.workers > 256) r.fail("workers", "must lie in [1, 256]");
  if (r.has("output_dir")) rc.output_dir = r.raw("output_dir");
  std::set<std::string> used = {};
  std::vector<std::string> ids = r.has("scenarios") ? split_list(r.raw("scenarios")) : std::vector<std::string>{};
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) r.fail("scenarios", "scenario '" + id + "' listed twice");
    rc.scenarios.push_back(parse_scenario(kv, id, used));
  }
  used.insert(r.used().begin(), r.used().end());
  for (const auto& [key, value] : kv.entries) {
    if (!used.count(key)) {
      std::string hint = key.rfind("scenario.", 0) == 0 ? " (scenario not listed in run.scenarios, or unknown field)"
                                                         : "";
      throw ConfigError(kv.source + ":" + std::to_string(kv.line_of.at(key)) + ": " + key + ": unknown key" + hint);
    }
  }
  return rc;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(load_key_values(path)); }

std::vector<std::string> builtin_ids() { return {"brownian-sheet-baseline", "anisotropic-sheet"}; }

std::string builtin_config_text(const std::string& id) {
  if (id == "brownian-sheet-baseline") {
    return "run.scenarios = brownian-sheet-baseline\n"
           "scenario.brownian-sheet-baseline.H = 0.5\n"
           "scenario.brownian-sheet-baseline.N = 2\n"
           "scenario.brownian-sheet-baseline.d = 1\n"
           "scenario.brownian-sheet-baseline.interval.lower = 1\n"
           "scenario.brownian-sheet-baseline.interval.upper = 2\n"
           "scenario.brownian-sheet-baseline.grid.cells = 64\n"
           "scenario.brownian-sheet-baseline.localtime.bin_width = auto\n"
           "scenario.brownian-sheet-baseline.replicas = 200\n"
           "scenario.brownian-sheet-baseline.scaling.cells = 64\n";
  }
  if (id == "anisotropic-sheet") {
    return "run.scenarios = anisotropic-sheet\n"
           "scenario.anisotropic-sheet.H = 0.4, 0.6\n"
           "scenario.anisotropic-sheet.d = 1\n"
           "scenario.anisotropic-sheet.interval.lower = 1\n"
           "scenario.anisotropic-sheet.interval.upper = 2\n"
           "scenario.anisotropic-sheet.grid.cells = 128\n"
           "scenario.anisotropic-sheet.replicas = 200\n"
           "scenario.anisotropic-sheet.scaling.cells = 128\n";
  }
  throw ConfigError("unknown built-in scenario '" + id + "'");
}

std::string resolve_output_dir(const std::string& configured) {
  const char* env = std::getenv("FBSLAB_OUT_DIR");
  if (env != nullptr && *env != '\0') return env;
  return configured;
}

}  // namespace fbs::harness
