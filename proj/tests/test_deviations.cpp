#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "wchaos/deviations.hpp"

using namespace wchaos;

TEST_CASE("delta_from_K examples") {
  // q=2, K = n^{-1/2}: Delta = n^{1/4}/8
  for (double n : {16.0, 10000.0}) {
    const auto p = delta_from_K(2, 1.0 / std::sqrt(n));
    CHECK(p.delta == doctest::Approx(std::pow(n, 0.25) / 8.0).epsilon(1e-13));
    CHECK(p.gamma == 0.0);
    CHECK(p.alpha == doctest::Approx(0.5));
  }
  CHECK(delta_from_K(2, 1.0).delta == doctest::Approx(0.125).epsilon(1e-14));

  // q=3, K = 2/sqrt(3n): Delta = 3^{-9/2} (sqrt(3n)/2)^{5/12}
  const double n = 27.0;
  const auto p3 = delta_from_K(3, 2.0 / std::sqrt(3.0 * n));
  CHECK(p3.delta == doctest::Approx(std::pow(3.0, -4.5) *
                                    std::pow(std::sqrt(3.0 * n) / 2.0, 5.0 / 12.0))
                        .epsilon(1e-13));
  CHECK(p3.gamma == doctest::Approx(0.5));

  const auto unbounded = delta_from_K(2, 0.0);
  CHECK(unbounded.delta_unbounded);
  CHECK(std::isinf(unbounded.delta));
  CHECK_THROWS_AS(delta_from_K(2, 1.5), std::invalid_argument);
}

TEST_CASE("delta_from_L mirrors delta_from_K and allows L > 1") {
  CHECK(delta_from_L(2, 0.5).delta == doctest::Approx(delta_from_K(2, 0.5).delta));
  const auto p = delta_from_L(3, 2.0 / std::sqrt(27.0));
  CHECK(p.delta ==
        doctest::Approx(std::pow(3.0, -4.5) * std::pow(std::sqrt(27.0) / 2.0, 5.0 / 12.0))
            .epsilon(1e-13));
  // monotone decreasing in L
  CHECK(delta_from_L(2, 2.0).delta < delta_from_L(2, 1.0).delta);
  CHECK(delta_from_L(2, 1.0).delta < delta_from_L(2, 0.5).delta);
}

TEST_CASE("gamma and exponent identity for q in 2..8") {
  for (int q = 2; q <= 8; ++q) {
    const auto p = delta_from_K(q, 0.5);
    CHECK(p.gamma == doctest::Approx(q / 2.0 - 1.0));
    // 1/(1+2 gamma) = 1/(q-1)
    CHECK(1.0 / (1.0 + 2.0 * p.gamma) == doctest::Approx(1.0 / (q - 1)).epsilon(1e-14));
  }
}

TEST_CASE("rate_function") {
  CHECK(rate_function(0.0, 2) == 0.0);
  CHECK(rate_function(2.0, 2) == doctest::Approx(1.0));          // 4/(2*2)
  CHECK(rate_function(std::sqrt(12.0), 3) == doctest::Approx(1.0));  // 2*3! = 12
  // strictly convex, minimum 0 at z = 0
  double prev = rate_function(0.0, 2);
  for (double z : {0.5, 1.0, 1.5, 2.0}) {
    CHECK(rate_function(z, 2) > prev);
    prev = rate_function(z, 2);
    CHECK(rate_function(-0.0, 2) == 0.0);
  }
}

TEST_CASE("tail_bound examples and monotonicity") {
  CHECK(tail_bound(0.0, 2, 1.0) == 2.0);
  CHECK(tail_bound(2.0, 2, 1.0) == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-14));
  double prev = 2.0;
  for (double z : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double b = tail_bound(z, 2, 0.7);
    CHECK(b <= prev);
    CHECK(b > 0.0);
    prev = b;
  }
  // Delta acts through the (z Delta)^{2/q} branch only:
  // z small keeps the Gaussian branch active, Delta has no effect
  CHECK(tail_bound(0.5, 2, 10.0) == doctest::Approx(tail_bound(0.5, 2, 100.0)));
  // z large with small Delta: Weibull branch active, bound sharpens as Delta grows
  CHECK(tail_bound(50.0, 2, 0.02) < tail_bound(50.0, 2, 0.01));
  // once the Gaussian branch takes over, further Delta growth is inert
  CHECK(tail_bound(50.0, 2, 1e6) == doctest::Approx(tail_bound(50.0, 2, 1e7)));
}

TEST_CASE("major_bound and comparator") {
  CHECK(major_bound(0.0, 2, 1.0) == doctest::Approx(1.0));
  CHECK(major_bound(std::sqrt(2.0), 2, 1.0) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(major_bound(1.0, 2, 0.0), std::invalid_argument);
  // improvement region: z and Delta sufficiently large
  for (double delta : {2.0, 4.0})
    for (double z : {8.0, 10.0, 12.0}) CHECK(tail_beats_major(z, 2, delta, 1.0));
  // and a regime where it does not (tiny Delta)
  CHECK(!tail_beats_major(1.0, 2, 0.05, 1.0));
}

TEST_CASE("ratio_diagnostic") {
  const double z = 1.25;
  const double p = gaussian_tail(z, 2.0);
  const auto d = ratio_diagnostic(p, z, 2, 3.0);
  CHECK(d.log_ratio_abs == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.constants_unspecified);

  const auto d0 = ratio_diagnostic(0.5, 0.0, 2, 3.0);
  CHECK(d0.log_ratio_abs == doctest::Approx(0.0).epsilon(1e-12));

  // shape at z = sqrt(q!) is 2/Delta^{1/(q-1)}
  const auto ds = ratio_diagnostic(0.1, std::sqrt(2.0), 2, 4.0);
  CHECK(ds.shape == doctest::Approx(2.0 / 4.0).epsilon(1e-13));
  const auto ds3 = ratio_diagnostic(0.1, std::sqrt(6.0), 3, 4.0);
  CHECK(ds3.shape == doctest::Approx(2.0 / 2.0).epsilon(1e-13));

  CHECK_THROWS_AS(ratio_diagnostic(0.0, 1.0, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ratio_diagnostic(1.0, 1.0, 2, 1.0), std::invalid_argument);
}

TEST_CASE("gaussian_tail precision and symmetry") {
  CHECK(gaussian_tail(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(gaussian_tail(100.0, 1.0) == doctest::Approx(0.0));
  // standard normal quantile oracle
  CHECK(gaussian_tail(1.959963984540054, 1.0) == doctest::Approx(0.025).epsilon(1e-10));
  boost::math::normal_distribution<double> normal(0.0, 2.0);
  for (double z : {0.1, 0.7, 1.9, 3.4})
    CHECK(gaussian_tail(z, 4.0) ==
          doctest::Approx(boost::math::cdf(boost::math::complement(normal, z)))
              .epsilon(1e-12));
  for (double z : {-2.0, -0.3, 0.4, 2.2})
    CHECK(gaussian_tail(z, 3.0) + gaussian_tail(-z, 3.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(gaussian_tail(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("hermite_sum_tail_lower") {
  CHECK(hermite_sum_tail_lower(1.0, 1.0, 2, 1.0, 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(hermite_sum_tail_lower(100.0, 1e9, 2, 1.0, 1.0) == doctest::Approx(0.0));
  // n^{1/q} z^{2/q} is invariant under (n, z) -> (n t, z/t^{1/2})
  const double base = hermite_sum_tail_lower(50.0, 2.0, 2, 1.0, 1.0);
  const double moved = hermite_sum_tail_lower(200.0, 1.0, 2, 1.0, 1.0);
  CHECK(base == doctest::Approx(moved).epsilon(1e-12));
  CHECK_THROWS_AS(hermite_sum_tail_lower(10.0, 1.0, 2, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("berry_esseen_shape") {
  CHECK(berry_esseen_shape(5.0, 0.0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(berry_esseen_shape(4.0, 0.5) == doctest::Approx(0.5).epsilon(1e-14));  // 4^{-1/2}
  CHECK(berry_esseen_shape(9.0, 0.5) > berry_esseen_shape(16.0, 0.5));
}

TEST_CASE("mdp_scale_check verdicts") {
  const auto make = [](double exponent, int points = 6) {
    ScaleSequence a;
    for (int i = 0; i < points; ++i) {
      const double n = std::pow(10.0, 1.0 + i);
      a.index.push_back(n);
      a.value.push_back(std::pow(n, exponent));
    }
    return a;
  };
  const auto hermite_delta = [](const ScaleSequence& a) {
    std::vector<double> d;
    for (double n : a.index) d.push_back(std::pow(n, 0.25) / 8.0);
    return d;
  };

  const auto window = make(0.05);
  CHECK(mdp_scale_check(window, hermite_delta(window), 2).verdict == MdpVerdict::Window);

  const auto no_window = make(0.6);
  CHECK(mdp_scale_check(no_window, hermite_delta(no_window), 2).verdict ==
        MdpVerdict::NoWindow);

  const auto open = make(0.3);
  CHECK(mdp_scale_check(open, hermite_delta(open), 2).verdict ==
        MdpVerdict::Indeterminate);

  ScaleSequence too_short = make(0.05, 3);
  CHECK_THROWS_AS(mdp_scale_check(too_short, hermite_delta(too_short), 2),
                  std::invalid_argument);
}
