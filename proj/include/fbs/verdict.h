#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fbs {

// Outcome of one numerical check. `asserted` checks can fail a run; report-only
// checks carry their numbers but always pass.
struct Verdict {
  std::string check_id;
  std::string reference;  // short description of the statement being checked
  std::vector<std::pair<std::string, double>> inputs;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;      // signed margin; >= -tolerance passes
  double tolerance = 0.0;
  bool asserted = true;
  bool pass = true;
  std::string note;
};

}  // namespace fbs
