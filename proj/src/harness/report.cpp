#include "fbs/harness/report.h"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <cmath>

namespace fbs::harness {
namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json box_json(const Box& b) { return json{{"lower", nums(b.lower)}, {"upper", nums(b.upper)}}; }

}  // namespace

std::size_t ScenarioReport::failed() const {
  std::size_t n = 0;
  for (const auto& v : verdicts) n += (v.asserted && !v.pass) ? 1 : 0;
  return n;
}

std::size_t RunReport::asserted() const {
  std::size_t n = 0;
  for (const auto& s : scenarios) {
    for (const auto& v : s.verdicts) n += v.asserted ? 1 : 0;
  }
  return n;
}

std::size_t RunReport::failed() const {
  std::size_t n = 0;
  for (const auto& s : scenarios) n += s.failed();
  return n;
}

json to_json(const Verdict& v) {
  json in = json::object();
  for (const auto& [k, x] : v.inputs) in[k] = num(x);
  std::string verdict = v.asserted ? (v.pass ? "pass" : "fail") : "report";
  json j{{"check_id", v.check_id}, {"reference", v.reference}, {"inputs", in},    {"lhs", num(v.lhs)},
         {"rhs", num(v.rhs)},       {"slack", num(v.slack)},    {"tolerance", num(v.tolerance)},
         {"asserted", v.asserted},  {"verdict", verdict}};
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

json to_json(const FitRecord& f) {
  json j{{"name", f.name},
         {"method", f.method},
         {"radii", nums(f.radii)},
         {"values", nums(f.values)},
         {"spread", nums(f.spread)},
         {"slope", num(f.fit.slope)},
         {"intercept", num(f.fit.intercept)},
         {"stderr", num(f.fit.stderr_)},
         {"expected", f.has_expected ? num(f.expected) : json(nullptr)}};
  if (!f.note.empty()) j["note"] = f.note;
  return j;
}

json to_json(const ExperimentConfig& c) {
  return json{{"id", c.id},
              {"H", nums(c.hurst)},
              {"N", c.n_axes},
              {"d", c.d},
              {"interval", box_json(c.interval)},
              {"grid_cells", c.cells},
              {"grid_step", num(c.grid_step())},
              {"bin_width", num(c.bin_width)},
              {"bin_width_auto", c.bin_width_auto},
              {"x", nums(c.level)},
              {"replicas", c.replicas},
              {"scaling", {{"radii", nums(c.radii)}, {"cells", c.scaling_cells}, {"bin_width", num(c.scaling_bin_width)}}},
              {"verify_configs", c.verify_configs},
              {"tolerance", {{"quadrature", num(c.tol.quadrature)}, {"exact", num(c.tol.exact)}}}};
}

json to_json(const ExponentProfile& p) {
  return json{{"tau", p.tau},        {"beta", num(p.beta_tau)},
              {"alpha", num(p.alpha_tau)}, {"nu", num(p.nu)},
              {"dim_level_set", num(p.dim_level_set)}, {"q", num(p.q)},
              {"candidates", nums(p.candidates)}};
}

json to_json(const HolderWeights& w) {
  return json{{"tau", w.tau},
              {"p", nums(w.p)},
              {"eps", nums(w.eps)},
              {"delta", num(w.delta)},
              {"delta_tau", num(w.delta_tau)},
              {"ell0", w.ell0},
              {"rho", num(w.rho)},
              {"eta", num(w.eta)},
              {"alpha", num(w.alpha)}};
}

json to_json(const MomentReport& m) {
  return json{{"n", m.n},
              {"x", nums(m.x)},
              {"box", box_json(m.box)},
              {"value", num(m.value)},
              {"error", num(m.quad_error)},
              {"method", m.method},
              {"tube", num(m.tube)},
              {"truncated", num(m.truncated)},
              {"excluded_mass", num(m.excluded_mass)},
              {"local_power", num(m.local_power)},
              {"converged", m.converged}};
}

json to_json(const SuiteResult& s) {
  json v = json::array();
  for (const auto& x : s.verdicts) v.push_back(to_json(x));
  return json{{"suite", s.name}, {"failed", s.failed()}, {"verdicts", v}};
}

json to_json(const ScenarioReport& s) {
  json verdicts = json::array(), fits = json::array(), constants = json::array(), moments = json::array();
  for (const auto& v : s.verdicts) verdicts.push_back(to_json(v));
  for (const auto& f : s.fits) fits.push_back(to_json(f));
  for (const auto& c : s.constants) {
    json j{{"name", c.name}, {"value", num(c.value)}};
    if (!c.note.empty()) j["note"] = c.note;
    constants.push_back(j);
  }
  for (const auto& m : s.moments) moments.push_back(to_json(m));
  return json{{"id", s.id},
              {"config", to_json(s.config)},
              {"exponents", to_json(s.profile)},
              {"weights", to_json(s.weights)},
              {"moments", moments},
              {"verdicts", verdicts},
              {"fits", fits},
              {"constants", constants},
              {"artifacts", s.artifacts},
              {"failed", s.failed()}};
}

json versions() {
  return json{{"fbslab", kToolVersion},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) +
                            "." + std::to_string(BOOST_VERSION % 100)}};
}

json to_json(const RunReport& r) {
  json sc = json::array();
  for (const auto& s : r.scenarios) sc.push_back(to_json(s));
  return json{{"schema_version", kSchemaVersion},
              {"kind", "run-report"},
              {"versions", versions()},
              {"master_seed", r.config.master_seed},
              {"scenarios", sc},
              {"summary", {{"asserted", r.asserted()}, {"failed", r.failed()}, {"pass", r.pass()}}}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace fbs::harness
