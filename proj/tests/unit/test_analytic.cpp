#include <doctest.h>

#include <cmath>

#include "fbs/analytic.h"
#include "fbs/errors.h"
#include "fbs/field_model.h"

using namespace fbs;

// Reference values come from tests/oracles/oracles.py (mpmath, 30 digits).

TEST_SUITE("analytic") {
  TEST_CASE("first moment against quadrature oracles") {
    const MomentReport a = exact_moment({0.0}, Box{{1.0}, {2.0}}, validate_hurst({0.5}, 1), 1);
    CHECK(a.method == "quadrature");
    CHECK(a.value == doctest::Approx(0.33049460629264722).epsilon(1e-9));
    CHECK(a.quad_error <= 1e-8 * a.value);

    const Box T2{{1.0, 1.0}, {2.0, 2.0}};
    CHECK(exact_moment({0.0}, T2, validate_hurst({0.5, 0.5}, 1), 1).value ==
          doctest::Approx(0.27379069643514184).epsilon(1e-9));
    CHECK(exact_moment({0.0}, T2, validate_hurst({0.4, 0.6}, 1), 1).value ==
          doctest::Approx(0.27389967827892261).epsilon(1e-9));
    // The stored axis order does not matter.
    CHECK(exact_moment({0.0}, T2, validate_hurst({0.6, 0.4}, 1), 1).value ==
          doctest::Approx(0.27389967827892261).epsilon(1e-9));
  }

  TEST_CASE("first moment decays away from the origin") {
    const HurstVector H = validate_hurst({0.5}, 1);
    const Box T{{1.0}, {2.0}};
    CHECK(exact_moment({1.0}, T, H, 1).value == doctest::Approx(0.23265151557311874).epsilon(1e-9));
    CHECK(exact_moment({-1.0}, T, H, 1).value == doctest::Approx(0.23265151557311874).epsilon(1e-9));
    double last = INFINITY;
    for (double x : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
      const double v = exact_moment({x}, T, H, 1).value;
      CHECK(v < last);
      CHECK(v > 0.0);
      last = v;
    }
  }

  TEST_CASE("anchored first moment is an exact power law for N = 1") {
    // With stationary increments E L(B(a), [a, a + r]) = (2 pi)^{-1/2} r^{1-H} / (1 - H).
    const HurstVector H = validate_hurst({0.3}, 1);
    const ScalingFit s = moment_scaling_exact({0.0}, {1.0}, H, {0.05, 0.1, 0.2, 0.4}, true, 1e-10);
    CHECK(s.fit.slope == doctest::Approx(0.7).epsilon(1e-7));
    for (std::size_t i = 0; i < s.radii.size(); ++i) {
      CHECK(s.moments[i] == doctest::Approx(std::pow(s.radii[i], 0.7) / 0.7 / std::sqrt(2.0 * M_PI)).epsilon(1e-8));
    }
  }

  TEST_CASE("second moment for N = 1") {
    MomentOptions o;
    o.tol = 1e-7;
    const MomentReport m = exact_moment({0.0}, Box{{1.0}, {2.0}}, validate_hurst({0.5}, 1), 2, o);
    CHECK(m.converged);
    CHECK(m.local_power == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(m.value == doctest::Approx(0.36338022763241866).epsilon(1e-6));
    CHECK(std::fabs(m.value - 0.36338022763241866) <= m.quad_error + 1e-12);
  }

  TEST_CASE("second moment diverges when H d >= 1") {
    const HurstVector H = validate_hurst({0.6}, 2);
    const Box T{{1.0}, {2.0}};
    double last = 0.0, last_gain = 0.0;
    for (double tube : {1e-1, 1e-2, 1e-3}) {
      MomentOptions o;
      o.tube = tube;
      o.tol = 1e-6;
      const MomentReport m = exact_moment({0.0, 0.0}, T, H, 2, o);
      CHECK_FALSE(m.converged);
      CHECK(m.local_power > 1.0);
      CHECK(m.truncated > last);
      CHECK(m.truncated - last >= last_gain);
      last_gain = m.truncated - last;
      last = m.truncated;
    }
    CHECK_THROWS_AS(exact_moment({0.0, 0.0}, T, H, 2), NumericalError);
  }

  TEST_CASE("moment argument checks") {
    const HurstVector H = validate_hurst({0.5, 0.5}, 1);
    const Box T{{1.0, 1.0}, {2.0, 2.0}};
    CHECK_THROWS_AS(exact_moment({0.0}, T, H, 4), DomainError);
    CHECK_THROWS_AS(exact_moment({0.0}, Box{{1, 1, 1, 1}, {2, 2, 2, 2}}, validate_hurst({0.5, 0.5, 0.5, 0.5}, 1), 2),
                    DomainError);
    CHECK_THROWS_AS(exact_moment({0.0, 0.0}, T, H, 1), ArityError);
    CHECK_THROWS_AS(exact_moment({0.0}, Box{{1.0}, {2.0}}, H, 1), ArityError);
    MomentOptions o;
    o.anchor = Point{1.5, 1.0};
    CHECK_THROWS_AS(exact_moment({0.0}, T, H, 1, o), DomainError);
  }

  TEST_CASE("Monte Carlo path for higher moments") {
    MomentOptions o;
    o.mc_samples = 20000;
    const MomentReport m = exact_moment({0.0}, Box{{1.0, 1.0}, {2.0, 2.0}}, validate_hurst({0.5, 0.5}, 1), 2, o);
    CHECK(m.method == "monte-carlo");
    CHECK(m.quad_error > 0.0);
    CHECK(m.value > 0.27379069643514184 * 0.27379069643514184);
    // Same seed, same answer.
    CHECK(exact_moment({0.0}, Box{{1.0, 1.0}, {2.0, 2.0}}, validate_hurst({0.5, 0.5}, 1), 2, o).value == m.value);
  }

  TEST_CASE("increment moment") {
    const HurstVector H = validate_hurst({0.5}, 1);
    const Box T{{1.0}, {2.0}};
    MomentOptions o;
    o.tol = 1e-6;
    const IncrementMoment same = increment_moment_two({0.2}, {0.2}, T, H, 0.25, 1.0, o);
    CHECK(same.value == 0.0);
    CHECK(same.method == "exact");

    const IncrementMoment a = increment_moment_two({0.0}, {0.3}, T, H, 0.25, 1.0, o);
    CHECK(a.value == doctest::Approx(0.31125034742501079).epsilon(1e-5));
    const IncrementMoment b = increment_moment_two({0.0}, {0.1}, T, H, 0.25, 1.0, o);
    CHECK(b.value == doctest::Approx(0.12235072736550609).epsilon(1e-5));
    const IncrementMoment c = increment_moment_two({0.0}, {0.03}, T, H, 0.25, 1.0, o);
    CHECK(c.value < b.value);
    CHECK(b.value < a.value);
    for (const auto& m : {a, b, c}) CHECK(m.value <= m.bound_rhs);

    CHECK_THROWS_AS(increment_moment_two({0.0}, {0.1}, T, H, 0.6, 1.0, o), DomainError);
    CHECK_THROWS_AS(increment_moment_two({0.0}, {1.5}, T, H, 0.25, 1.0, o), DomainError);
    CHECK_THROWS_AS(increment_moment_two({0.0}, {0.1}, Box{{1.0, 1.0}, {2.0, 3.0}}, validate_hurst({0.5, 0.5}, 1),
                                         0.25, 1.0, o),
                    DomainError);
  }

  TEST_CASE("Gaussian u-integral identity") {
    const HurstVector H = validate_hurst({0.5}, 1);
    const CuzickPair p = cuzick_identity_check({{1.0}, {2.0}}, CovModel::full_sheet(), H, 0.5);
    CHECK(p.lhs == doctest::Approx(6.1433283092085967).epsilon(1e-9));
    CHECK(p.rhs == doctest::Approx(6.1433283092085967).epsilon(1e-9));
    // gamma = 0 recovers the Gaussian normalization (2 pi)^{n/2} / sqrt(det).
    const CuzickPair z = cuzick_identity_check({{1.0}, {2.0}}, CovModel::full_sheet(), H, 0.0);
    CHECK(z.lhs == doctest::Approx(2.0 * M_PI).epsilon(1e-9));
    CHECK(z.rhs == doctest::Approx(2.0 * M_PI).epsilon(1e-9));
    const CuzickPair one = cuzick_identity_check({{1.5}}, CovModel::full_sheet(), H, 0.3);
    CHECK(one.lhs == doctest::Approx(one.rhs).epsilon(1e-8));
  }

  TEST_CASE("tail frequencies") {
    TailOptions o;
    o.replicas = 400;
    o.cells = 16;
    o.seed = SeedSpec{5, 0};
    const TailReport t = tail_bound_check(validate_hurst({0.5, 0.5}, 1), {1.0, 1.0}, 0.5, {0.1, 0.5, 1.0, 2.0, 3.0}, o);
    CHECK(t.monotone);
    for (std::size_t i = 1; i < t.frequency.size(); ++i) CHECK(t.frequency[i] <= t.frequency[i - 1]);
    CHECK(t.frequency.front() > 0.9);
    CHECK(t.frequency.back() < 0.05);
    CHECK(t.median_sup > 0.0);
    CHECK_THROWS_AS(tail_bound_check(validate_hurst({0.5}, 1), {1.0}, 1.5, {1.0}, o), DomainError);
    CHECK_THROWS_AS(tail_bound_check(validate_hurst({0.5}, 1), {1.0, 1.0}, 0.5, {1.0}, o), ArityError);
  }
}
