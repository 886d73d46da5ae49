#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fbs/verdict.h"

namespace fbs::harness {

// Worst-case tracker over many configurations: value is a deviation, limit its
// allowance. The kept configuration is the one with the smallest margin.
struct Worst {
  double value = 0.0;
  double limit = 0.0;
  long violations = 0;
  long count = 0;
  long worst_index = -1;

  void add(double v, double lim, long index) {
    ++count;
    if (!(v <= lim)) ++violations;
    const double margin = lim - v;
    if (worst_index < 0 || !(margin >= limit - value)) {
      value = v;
      limit = lim;
      worst_index = index;
    }
  }
};

inline Verdict finish(const std::string& id, const std::string& ref, const Worst& w,
                      std::vector<std::pair<std::string, double>> inputs) {
  Verdict v;
  v.check_id = id;
  v.reference = ref;
  inputs.emplace_back("configurations", static_cast<double>(w.count));
  inputs.emplace_back("violations", static_cast<double>(w.violations));
  inputs.emplace_back("worst_configuration", static_cast<double>(w.worst_index));
  v.inputs = std::move(inputs);
  v.lhs = w.value;
  v.rhs = w.limit;
  v.slack = w.limit - w.value;
  v.tolerance = 0.0;
  v.asserted = true;
  v.pass = w.violations == 0 && w.count > 0;
  v.note = "lhs is the worst deviation, rhs its limit";
  return v;
}

}  // namespace fbs::harness
