#include <doctest.h>

#include <cmath>

#include "fbs/errors.h"
#include "fbs/field_model.h"
#include "fbs/hurst.h"

using namespace fbs;

// Reference values come from tests/oracles/oracles.py (mpmath, 30 digits).

TEST_SUITE("field_model") {
  TEST_CASE("validate_hurst keeps stored order and sorts a view") {
    const HurstVector a = validate_hurst({0.5, 0.5}, 1);
    CHECK(a.sort_perm == std::vector<int>{0, 1});
    const HurstVector b = validate_hurst({0.6, 0.4}, 2);
    CHECK(b.sorted() == std::vector<double>{0.4, 0.6});
    CHECK(b.h == std::vector<double>{0.6, 0.4});
    CHECK(b.sort_perm == std::vector<int>{1, 0});
    CHECK_THROWS_AS(validate_hurst({1.0, 0.3}, 1), DomainError);
    CHECK_THROWS_WITH_AS(validate_hurst({1.0, 0.3}, 1), doctest::Contains("axis 1"), DomainError);
    CHECK_THROWS_AS(validate_hurst({}, 1), ArityError);
  }

  TEST_CASE("fbs_cov at single points") {
    CHECK(fbs_cov({1.0}, {2.0}, validate_hurst({0.5}, 1)) == doctest::Approx(1.0).epsilon(1e-15));
    for (double h : {0.1, 0.37, 0.9}) CHECK(fbs_cov({1.0}, {1.0}, validate_hurst({h}, 1)) == doctest::Approx(1.0));
    CHECK(fbs_cov({1.0}, {2.0}, validate_hurst({0.25}, 1)) == doctest::Approx(0.70710678118654752).epsilon(1e-14));
    CHECK_THROWS_AS(fbs_cov({1.0, 2.0}, {1.0}, validate_hurst({0.5}, 1)), ArityError);
  }

  TEST_CASE("kernel_g") {
    CHECK(kernel_g(0.5, 1.0, 0.3) == 1.0);
    CHECK(kernel_g(0.75, 1.0, -1.0) == doctest::Approx(0.18920711500272107).epsilon(1e-14));
    for (double h : {0.2, 0.5, 0.8}) CHECK(kernel_g(h, 1.0, 1.0) == 0.0);
    // Continuity in h away from the jump points.
    CHECK(kernel_g(0.5 + 1e-9, 1.0, 0.3) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(kernel_g(0.5 - 1e-9, 1.0, -0.3) == doctest::Approx(0.0).epsilon(1e-7));
  }

  TEST_CASE("kappa per-axis factor against the closed form") {
    CHECK(kappa(validate_hurst({0.5}, 1), 1e-10).value == 1.0);
    const double h[] = {0.1, 0.3, 0.7, 0.75, 0.9};
    const double ref[] = {7.8162180461563903, 1.8750709111678687, 0.83889297187184363, 0.87401918476403994,
                          1.5195745362088706};
    for (int i = 0; i < 5; ++i) {
      CAPTURE(h[i]);
      CHECK(kappa_axis_squared(h[i], 1e-10) == doctest::Approx(ref[i]).epsilon(1e-9));
    }
    const KappaValue k = kappa(validate_hurst({0.3, 0.7}, 1), 1e-10);
    CHECK(k.value * k.value == doctest::Approx(ref[1] * ref[2]).epsilon(1e-9));
    CHECK(k.per_axis[0] * k.per_axis[0] == doctest::Approx(ref[1]).epsilon(1e-9));
  }

  TEST_CASE("liouville_cov") {
    const HurstVector H = validate_hurst({0.3, 0.8}, 1);
    const Point t{1.3, 0.7};
    const double expect = std::pow(1.3, 0.6) / 0.6 * std::pow(0.7, 1.6) / 1.6;
    CHECK(liouville_cov(t, t, H, 1e-10) == doctest::Approx(expect).epsilon(1e-9));
    CHECK(liouville_cov({1.0, 3.0}, {2.0, 0.5}, validate_hurst({0.5, 0.5}, 1), 1e-10) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(liouville_cov({1.0}, {2.0}, validate_hurst({0.3}, 1), 1e-10) ==
          doctest::Approx(1.1673409633100588).epsilon(1e-9));
  }

  TEST_CASE("component covariances at H = 1/2") {
    const HurstVector H = validate_hurst({0.5, 0.5}, 1);
    const Point t{1.0, 1.0};
    CHECK(component_cov(RegionComponent::slab(0, 0.5), t, t, H, 1e-10) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(component_cov(RegionComponent::corner(0.5), t, t, H, 1e-10) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(component_cov(RegionComponent::remainder(0.5), t, t, H, 1e-10) == doctest::Approx(0.25).epsilon(1e-10));
    // Empty slab when the axis coordinate equals epsilon.
    CHECK(component_cov(RegionComponent::slab(0, 0.5), {0.5, 1.0}, {0.5, 1.0}, H, 1e-10) == doctest::Approx(0.0));
    CHECK_THROWS_AS(component_cov(RegionComponent::slab(0, 1.5), t, t, H, 1e-10), DomainError);
  }

  TEST_CASE("decomposition sums to the Liouville covariance") {
    const HurstVector H = validate_hurst({0.3, 0.7, 0.55}, 1);
    const Point s{1.2, 1.7, 1.1}, t{1.9, 1.3, 1.5};
    const ComponentCovs c = all_components(0.4, s, t, H, 1e-11);
    double sum = c.corner + c.remainder;
    for (double x : c.slab) sum += x;
    CHECK(sum == doctest::Approx(liouville_cov(s, t, H, 1e-11)).epsilon(1e-9));
    const ComponentCovs v = all_components(0.4, t, t, H, 1e-11);
    CHECK(v.remainder >= 0.0);
  }

  TEST_CASE("slab_lower_bound") {
    const HurstVector H = validate_hurst({0.5, 0.5}, 1);
    CHECK(slab_lower_bound(0, 0.5, {1.0, 1.0}, 0.9, H) == doctest::Approx(0.05).epsilon(1e-13));
    CHECK(slab_lower_bound(1, 0.5, {1.0, 1.3}, 1.3, H) == 0.0);
    CHECK_THROWS_AS(slab_lower_bound(0, 0.5, {1.0, 1.0}, 1.2, H), DomainError);
  }

  TEST_CASE("partition_boxes") {
    auto count = [](const std::vector<PartitionBox>& b, RegionComponent::Kind k) {
      int n = 0;
      for (const auto& x : b) n += x.kind == k;
      return n;
    };
    using K = RegionComponent::Kind;
    const auto b1 = partition_boxes(0.5, {1.0});
    CHECK(b1.size() == 2);
    CHECK(count(b1, K::remainder) == 0);
    const auto b2 = partition_boxes(0.5, {1.0, 2.0});
    CHECK(count(b2, K::corner) == 1);
    CHECK(count(b2, K::slab) == 2);
    CHECK(count(b2, K::remainder) == 1);
    const Point t3{1.0, 2.0, 1.5};
    const auto b3 = partition_boxes(0.4, t3);
    CHECK(b3.size() == 8);
    CHECK(count(b3, K::remainder) == 4);
    double vol = 0.0;
    for (const auto& x : b3) vol += x.box.volume();
    CHECK(vol == doctest::Approx(3.0).epsilon(1e-14));
    CHECK_THROWS_AS(partition_boxes(1.5, {1.0, 2.0}), DomainError);
  }
}
