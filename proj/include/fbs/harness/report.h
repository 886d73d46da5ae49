#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "fbs/analytic.h"
#include "fbs/exponents.h"
#include "fbs/harness/config.h"
#include "fbs/harness/suites.h"
#include "fbs/local_time.h"
#include "fbs/regression.h"
#include "fbs/scaling.h"
#include "fbs/verdict.h"

namespace fbs::harness {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct FitRecord {
  std::string name;
  std::string method;            // "quadrature", "monte-carlo", ...
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> spread;    // standard errors or interquartile ranges, may be empty
  FitResult fit;
  bool has_expected = false;
  double expected = 0.0;
  std::string note;
};

struct ConstantRecord {
  std::string name;
  double value = 0.0;
  std::string note;
};

struct ScenarioReport {
  std::string id;
  ExperimentConfig config;
  ExponentProfile profile;
  HolderWeights weights;
  std::vector<MomentReport> moments;
  std::vector<Verdict> verdicts;
  std::vector<FitRecord> fits;
  std::vector<ConstantRecord> constants;
  std::vector<std::string> artifacts;  // paths relative to the output directory

  std::size_t failed() const;
};

struct RunReport {
  RunConfig config;
  std::vector<ScenarioReport> scenarios;
  double wall_clock_seconds = 0.0;  // written to timing.json only

  std::size_t asserted() const;
  std::size_t failed() const;
  bool pass() const { return failed() == 0; }
};

json to_json(const Verdict& v);
json to_json(const FitRecord& f);
json to_json(const ExperimentConfig& c);
json to_json(const ExponentProfile& p);
json to_json(const HolderWeights& w);
json to_json(const MomentReport& m);
json to_json(const SuiteResult& s);
json to_json(const ScenarioReport& s);
// The report carries no timing, so equal configs and seeds give equal bytes.
json to_json(const RunReport& r);
json versions();

// Two-space indented text with a trailing newline.
std::string dump(const json& j);

}  // namespace fbs::harness
