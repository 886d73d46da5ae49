#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fbs/hurst.h"
#include "fbs/verdict.h"

namespace fbs::harness {

struct SuiteResult {
  std::string name;
  std::vector<Verdict> verdicts;
  double seconds = 0.0;  // not serialized into reports

  bool pass() const;
  std::size_t failed() const;
};

struct IdentityOptions {
  int det_configs = 500;
  int selfsim_configs = 1000;
  int additivity_configs = 100;
  double quad_tol = 1e-10;
  std::uint64_t seed = 1;
};

// Determinant duality, the Gaussian u-integral identity for n <= 2, the
// simplex Beta reduction at n = 2, decomposition additivity and covariance
// self-similarity.
SuiteResult identity_suite(const IdentityOptions& opt = {});

struct InequalityOptions {
  int configs = 10000;        // per randomized inequality
  int kappa_grid = 20;
  double quad_tol = 1e-10;
  std::uint64_t seed = 2;
  int workers = 1;
};

// Variance domination by the Liouville sheet and by the slab components, the
// certified slab lower bound, and single-point kappa domination.
SuiteResult inequality_suite(const InequalityOptions& opt = {});

struct ArithmeticOptions {
  int configs = 10000;
  int max_axes = 5;
  std::uint64_t seed = 3;
};

// Holder-weight construction: sum rule, strict bounds, the delta inequality,
// the ell0 selection and the epsilon identity, plus the tau = 2 worked example.
SuiteResult arithmetic_suite(const ArithmeticOptions& opt = {});

struct ScenarioCheckOptions {
  int configs = 200;
  double quad_tol = 1e-8;
  std::uint64_t seed = 4;
  int workers = 1;
};

// Domination and the slab bound at points drawn from the scenario's own interval,
// plus two report-only constants: the smallest sectorial ratio and the largest
// determinant Holder constant seen.
SuiteResult scenario_checks(const HurstVector& H, int d, const Box& interval, const ScenarioCheckOptions& opt);

// Dispatch by name: identities, inequalities, arithmetic. Seed 0 keeps the
// suite default; configs_override <= 0 keeps the default counts.
SuiteResult run_suite(const std::string& name, std::uint64_t seed, int configs_override, int workers);

}  // namespace fbs::harness
