#include <doctest.h>

#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "fbs/errors.h"
#include "fbs/random.h"
#include "fbs/regression.h"

using namespace fbs;

TEST_SUITE("regression") {
  TEST_CASE("exact and constant power laws") {
    std::vector<double> r{0.1, 0.2, 0.4, 0.8}, v, c(4, 3.0);
    for (double x : r) v.push_back(2.5 * std::pow(x, 1.6));
    const FitResult f = fit_exponent(r, v);
    CHECK(f.slope == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(2.5)).epsilon(1e-12));
    CHECK(f.stderr_ == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(fit_exponent(r, c).slope == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  }

  TEST_CASE("invalid input") {
    CHECK_THROWS_AS(fit_exponent({0.1, 0.2, 0.4}, {1.0, 0.0, 2.0}), DomainError);
    CHECK_THROWS_AS(fit_exponent({0.1, 0.2}, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(fit_exponent({0.1, 0.2, 0.3}, {1.0, 2.0}), ArityError);
  }

  // Lognormal noise around r^1.6. The reported stderr is the plain OLS one, so
  // |slope - truth| / stderr follows Student t with n - 2 degrees of freedom.
  double coverage(int points, int trials, std::uint64_t seed) {
    std::vector<double> r;
    for (int k = 0; k < points; ++k) r.push_back(std::exp(-3.0 * k / (points - 1)));
    int covered = 0;
    for (int t = 0; t < trials; ++t) {
      const NormalStream z(SeedSpec{seed, static_cast<std::uint64_t>(t)}, 0);
      std::vector<double> v;
      for (int k = 0; k < points; ++k) v.push_back(std::pow(r[k], 1.6) * std::exp(0.1 * z(k)));
      const FitResult f = fit_exponent(r, v);
      covered += std::fabs(f.slope - 1.6) <= 2.0 * f.stderr_;
    }
    return static_cast<double>(covered) / trials;
  }

  TEST_CASE("noisy power-law calibration: 2 stderr covers the truth 95% of the time") {
    const double c = coverage(1000, 10000, 2024);
    CAPTURE(c);
    CHECK(c >= 0.95);
  }

  TEST_CASE("noisy power-law calibration: small samples follow Student t") {
    for (int n : {4, 8, 16}) {
      const double expect = 2.0 * boost::math::cdf(boost::math::students_t(n - 2), 2.0) - 1.0;
      const int trials = 4000;
      const double c = coverage(n, trials, 99 + n);
      CAPTURE(n);
      CAPTURE(c);
      CAPTURE(expect);
      CHECK(std::fabs(c - expect) <= 4.0 * std::sqrt(expect * (1.0 - expect) / trials));
    }
  }
}
