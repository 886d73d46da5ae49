#include "fbs/hurst.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "fbs/errors.h"

namespace fbs {

std::vector<double> HurstVector::sorted() const {
  std::vector<double> out(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) out[k] = h[sort_perm[k]];
  return out;
}

double HurstVector::min_h() const { return *std::min_element(h.begin(), h.end()); }

double HurstVector::inv_sum() const {
  double s = 0.0;
  for (double x : h) s += 1.0 / x;
  return s;
}

HurstVector validate_hurst(const std::vector<double>& raw, int d) {
  if (raw.empty()) throw ArityError("hurst: empty index list");
  if (d < 1) throw DomainError("hurst: ambient dimension d must be >= 1, got " + std::to_string(d));
  for (std::size_t l = 0; l < raw.size(); ++l) {
    const double x = raw[l];
    if (!(x > 0.0 && x < 1.0)) {
      throw DomainError("hurst: axis " + std::to_string(l + 1) + " has H = " + std::to_string(x) +
                        " outside (0,1)");
    }
  }
  HurstVector H;
  H.h = raw;
  H.n_axes = static_cast<int>(raw.size());
  H.ambient_dim = d;
  H.sort_perm.resize(raw.size());
  std::iota(H.sort_perm.begin(), H.sort_perm.end(), 0);
  std::stable_sort(H.sort_perm.begin(), H.sort_perm.end(),
                   [&](int a, int b) { return raw[a] < raw[b]; });
  return H;
}

HurstVector sorted_hurst(const HurstVector& H) { return validate_hurst(H.sorted(), H.ambient_dim); }

double Box::volume() const {
  double v = 1.0;
  for (std::size_t j = 0; j < lower.size(); ++j) v *= upper[j] - lower[j];
  return v;
}

bool Box::contains(const Point& t) const {
  if (t.size() != lower.size()) return false;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t[j] < lower[j] || t[j] > upper[j]) return false;
  }
  return true;
}

void validate_box(const Box& box, bool require_positive) {
  if (box.lower.size() != box.upper.size() || box.lower.empty()) {
    throw ArityError("box: lower/upper dimension mismatch");
  }
  for (std::size_t j = 0; j < box.lower.size(); ++j) {
    if (!(box.lower[j] < box.upper[j])) {
      throw DomainError("box: empty interior on axis " + std::to_string(j + 1));
    }
    if (require_positive && !(box.lower[j] > 0.0)) {
      throw DomainError("box: lower corner must be positive on axis " + std::to_string(j + 1));
    }
  }
}

Box cube(const Point& a, double r) {
  Box b{a, a};
  for (double& u : b.upper) u += r;
  return b;
}

}  // namespace fbs
