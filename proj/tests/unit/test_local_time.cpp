#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fbs/analytic.h"
#include "fbs/errors.h"
#include "fbs/local_time.h"

using namespace fbs;

namespace {

FieldSample brownian_path(int cells, std::uint64_t seed) {
  const Box T{{1.0}, {2.0}};
  return sample_field(Grid::midpoint(T, {cells}), validate_hurst({0.5}, 1), 1, SeedSpec{seed, 0});
}

// A field frozen at one value, built by hand.
FieldSample constant_field(const Grid& g, const HurstVector& H, const std::vector<double>& v) {
  FieldSample s;
  s.grid = g;
  s.hurst = H;
  s.d = static_cast<int>(v.size());
  for (double c : v) s.values.insert(s.values.end(), g.size(), c);
  return s;
}

}  // namespace

TEST_SUITE("local_time") {
  TEST_CASE("time weights cover exactly the box") {
    const Grid g = Grid::midpoint(Box{{1.0, 1.0}, {3.0, 2.0}}, {8, 4});
    const auto all = time_weights(g, Box{{1.0, 1.0}, {3.0, 2.0}});
    CHECK(std::accumulate(all.begin(), all.end(), 0.0) == doctest::Approx(2.0).epsilon(1e-14));
    const auto half = time_weights(g, Box{{2.0, 1.0}, {3.0, 2.0}});
    CHECK(std::accumulate(half.begin(), half.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::count(half.begin(), half.end(), 0.0) == 16);
  }

  TEST_CASE("histogram conserves time mass") {
    const Box T{{1.0}, {2.0}};
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const FieldSample s = brownian_path(512, seed);
      for (double w : {0.2, 0.05, 0.01}) {
        LatticeSpec spec;
        spec.width = w;
        const LocalTimeField f = occupation_histogram(s, T, spec);
        CHECK(f.overflow_mass == 0.0);
        CHECK(f.time_mass == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::fabs(f.recovered_mass() - f.time_mass) <= 1e-12);
      }
    }
  }

  TEST_CASE("fixed window books the rest as overflow") {
    const Box T{{1.0}, {2.0}};
    const FieldSample s = brownian_path(256, 5);
    LatticeSpec spec;
    spec.width = 0.05;
    spec.window_from_sample = false;
    spec.lower = {s.values[128] - 0.1};
    spec.bins = {4};
    const LocalTimeField f = occupation_histogram(s, T, spec);
    CHECK(f.overflow_mass > 0.0);
    CHECK(f.overflow_mass < f.time_mass);
    CHECK(std::fabs(f.recovered_mass() - f.time_mass) <= 1e-12);
  }

  TEST_CASE("constant field lands in one bin") {
    const HurstVector H = validate_hurst({0.5, 0.5}, 2);
    const Box T{{1.0, 1.0}, {2.0, 3.0}};
    const FieldSample s = constant_field(Grid::midpoint(T, {6, 5}), H, {0.3, -0.2});
    LatticeSpec spec;
    spec.width = 0.1;
    const LocalTimeField f = occupation_histogram(s, T, spec);
    int nonzero = 0;
    for (double v : f.values) nonzero += v > 0.0 ? 1 : 0;
    CHECK(nonzero == 1);
    const MaxLocalTime m = max_local_time(f);
    CHECK(m.value == doctest::Approx(2.0 / 0.01).epsilon(1e-12));
    CHECK(std::fabs(m.center[0] - 0.3) <= 0.05);
    CHECK(std::fabs(m.center[1] + 0.2) <= 0.05);
    const RangeBound rb = range_bound_check(s, f);
    CHECK(rb.holds);
    CHECK(rb.padded_range_volume == doctest::Approx(0.04).epsilon(1e-12));

    CHECK(level_set_points(s, {0.3, -0.2}, 0.0).size() == s.grid.size());
    CHECK(level_set_points(s, {0.3, -0.1}, 0.05).empty());
    CHECK(level_set_points(s, {0.3, -0.1}, 0.1 + 1e-12).size() == s.grid.size());
    CHECK_THROWS_AS(level_set_points(s, {0.3, -0.2}, -1.0), DomainError);
    CHECK_THROWS_AS(level_set_points(s, {0.3}, 0.1), ArityError);
  }

  TEST_CASE("occupation formula: constant and bin indicators are exact") {
    const Box T{{1.0}, {2.0}};
    const FieldSample s = brownian_path(1024, 11);
    LatticeSpec spec;
    spec.width = 0.03;
    const LocalTimeField f = occupation_histogram(s, T, spec);
    const OccupationPair one = occupation_check(s, T, f, ConstantOne{});
    CHECK(std::fabs(one.direct - one.via_density) <= 1e-12);
    CHECK(one.direct == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t b = 0; b < f.values.size(); ++b) {
      const OccupationPair p = occupation_check(s, T, f, BinIndicator{f.lattice.multi_index(b)});
      CHECK(std::fabs(p.direct - p.via_density) <= 1e-12);
    }
  }

  TEST_CASE("occupation formula: smooth functions are off by at most Lipschitz times half a bin") {
    const Box T{{1.0, 1.0}, {2.0, 2.0}};
    const HurstVector H = validate_hurst({0.5, 0.5}, 2);
    const FieldSample s = sample_field(Grid::midpoint(T, {64, 64}), H, 2, SeedSpec{4, 0});
    const GaussianBump bump{{0.0, 0.0}, 0.7};
    const double lip = std::exp(-0.5) / 0.7;  // sup of the gradient norm
    double last = INFINITY;
    for (double w : {0.2, 0.1, 0.05, 0.025}) {
      LatticeSpec spec;
      spec.width = w;
      const LocalTimeField f = occupation_histogram(s, T, spec);
      const OccupationPair p = occupation_check(s, T, f, bump);
      const double err = std::fabs(p.direct - p.via_density);
      CHECK(err <= lip * w * std::sqrt(2.0) / 2.0 * f.time_mass + 1e-12);
      last = std::min(last, err);
    }
    CHECK(last < 1e-3);

    const ClippedPolynomial poly{{1.0, 0.0, -1.0}, -1.0, 1.0};  // (1 - x^2) on [-1, 1]
    LatticeSpec spec;
    spec.width = 0.02;
    const LocalTimeField f = occupation_histogram(s, T, spec);
    const OccupationPair p = occupation_check(s, T, f, poly);
    CHECK(std::fabs(p.direct - p.via_density) <= 0.05);
    CHECK_THROWS_AS(occupation_check(s, T, f, GaussianBump{{0.0}, 1.0}), ArityError);
  }

  TEST_CASE("Gaussian kernel integrates to the time mass") {
    const Box T{{1.0}, {2.0}};
    const FieldSample s = brownian_path(256, 7);
    const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
    for (double k : {25.0, 400.0}) {
      const double dx = 0.02 / std::sqrt(k);
      double sum = 0.0;
      for (double x = *lo - 12.0 / std::sqrt(k); x <= *hi + 12.0 / std::sqrt(k); x += dx) {
        sum += kernel_local_time(s, T, {x}, k) * dx;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
    // Far from the range the kernel estimate vanishes as k grows.
    CHECK(kernel_local_time(s, T, {*hi + 1.0}, 1e4) == 0.0);
  }

  TEST_CASE("kernel and box estimates agree at a visited level") {
    const Box T{{1.0}, {2.0}};
    const FieldSample s = brownian_path(2048, 3);
    std::vector<double> v = s.values;
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    const double x = v[v.size() / 2];
    const double box = local_time_box(s, T, {x}, 0.02);
    const double kern = kernel_local_time(s, T, {x}, 2.0 * M_PI / (0.02 * 0.02));
    CHECK(box > 0.0);
    CHECK(kern == doctest::Approx(box).epsilon(0.25));
  }

  TEST_CASE("oscillation radii") {
    const FieldSample s = brownian_path(200, 9);
    const OscillationRecord rec = oscillation_stats(s, {1.5}, {1e-4, 0.01, 0.02, 0.1, 0.45});
    CHECK(rec.sup_osc[0] == 0.0);  // below the grid spacing only the centre is inside
    CHECK(rec.sup_osc[1] > 0.0);
    for (std::size_t i = 1; i < rec.sup_osc.size(); ++i) CHECK(rec.sup_osc[i] >= rec.sup_osc[i - 1]);
    CHECK_THROWS_AS(oscillation_stats(s, {1.5}, {0.6}), DomainError);
    CHECK_THROWS_AS(oscillation_stats(s, {1.5}, {0.0}), DomainError);
  }

  TEST_CASE("box counting counts shrink with box size") {
    const HurstVector H = validate_hurst({0.5, 0.5}, 1);
    const Box T{{1.0, 1.0}, {2.0, 2.0}};
    const FieldSample s = sample_field(Grid::midpoint(T, {65, 65}), H, 1, SeedSpec{2, 0});
    std::vector<double> v = s.values;
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    const BoxCount bc = box_counting(s, {v[v.size() / 2]}, {0, 1, 2, 3, 4});
    for (std::size_t j = 1; j < bc.counts.size(); ++j) {
      CHECK(bc.counts[j] <= bc.counts[j - 1]);
      CHECK(4.0 * bc.counts[j] >= bc.counts[j - 1]);
      CHECK(bc.sizes[j] == doctest::Approx(2.0 * bc.sizes[j - 1]));
    }
    CHECK(bc.dimension > 0.5);
    CHECK(bc.dimension < 2.0);
    CHECK_THROWS_AS(box_counting(s, {0.0}, {7}), DomainError);
    const FieldSample uneven = constant_field(Grid::from_coords({{1.0, 1.1, 1.5, 2.0}}), validate_hurst({0.5}, 1), {0.0});
    CHECK_THROWS_AS(box_counting(uneven, {0.0}, {0}), DomainError);
  }

  TEST_CASE("expected histogram estimator") {
    const Box T{{1.0}, {2.0}};
    const HurstVector H = validate_hurst({0.5}, 1);
    CHECK(histogram_expectation(Grid::midpoint(T, {16}), T, H, {0.0}, 0.25) ==
          doctest::Approx(0.32986630625645713).epsilon(1e-12));
    // Finer grids and narrower cubes approach E L(0, T).
    const double exact = 0.33049460629264722;
    CHECK(std::fabs(histogram_expectation(Grid::midpoint(T, {1024}), T, H, {0.0}, 0.01) - exact) < 1e-4);
  }

  TEST_CASE("resolution coupling") {
    CHECK(coupled_spacing(0.5, 0.04) == doctest::Approx(1e-4));
    CHECK(std::pow(coupled_spacing(0.3, 0.1), 0.3) == doctest::Approx(0.025));
    CHECK_THROWS_AS(coupled_spacing(1.0, 0.1), DomainError);
    CHECK_THROWS_AS(coupled_spacing(0.5, 0.0), DomainError);
  }
}
