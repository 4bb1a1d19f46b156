#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "wchaos/cumulants.hpp"

using namespace wchaos;

namespace {

SymmetricKernel hermite_sum_kernel(int q, int n) {
  SymmetricKernel h(q, n);
  for (int k = 0; k < n; ++k)
    h.set(IndexTuple(static_cast<std::size_t>(q), static_cast<std::uint16_t>(k)),
          1.0 / std::sqrt(static_cast<double>(n)));
  return h;
}

SymmetricKernel atom(int q, int dim = 2) {
  SymmetricKernel h(q, dim);
  h.set(IndexTuple(static_cast<std::size_t>(q), 0), 1.0);
  return h;
}

Eigen::MatrixXd random_symmetric(int dim, RngStream& rng) {
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) a(i, j) = a(j, i) = rng.normal();
  return a;
}

}  // namespace

TEST_CASE("multigraph classes partition Pi(q[m]) exactly") {
  for (int q = 2; q <= 4; ++q)
    for (int m = 2; m <= 6; ++m) {
      if ((q * m) % 2 != 0) {
        CHECK(multigraph_classes(q, m).empty());
        continue;
      }
      BigInt total = 0;
      for (const auto& cls : multigraph_classes(q, m)) {
        CHECK(cls.graph.regular(q));
        CHECK(cls.graph.connected());
        total += cls.sigma_count;
      }
      CHECK(total == count_partitions(q, m));
    }
}

TEST_CASE("exact_cumulant basics") {
  // unit-norm kernel: cum_2 = q!
  RngStream rng(31, 0);
  for (int q : {2, 3}) {
    const auto h = testing::random_kernel(q, 3, rng);
    CHECK(exact_cumulant(h, 2) == doctest::Approx(std::tgamma(q + 1.0)).epsilon(1e-12));
    CHECK(exact_cumulant(h, 1) == 0.0);
  }
  // atom q=2 kernel is H_2(Z): cum_3 = 8, cum_4 = 48
  CHECK(exact_cumulant(atom(2), 3) == doctest::Approx(8.0).epsilon(1e-13));
  CHECK(exact_cumulant(atom(2), 4) == doctest::Approx(48.0).epsilon(1e-13));
  // odd parity vanishes
  CHECK(exact_cumulant(atom(3), 3) == 0.0);
  CHECK(exact_cumulant(atom(3), 5) == 0.0);
}

TEST_CASE("exact_cumulant matches the quadratic-form oracle (q=2)") {
  RngStream rng(37, 1);
  for (int dim = 2; dim <= 6; ++dim) {
    const auto a = random_symmetric(dim, rng);
    const auto h = matrix_to_kernel(a);
    for (int m = 2; m <= 6; ++m) {
      const double oracle = quadratic_form_cumulant(a, m);
      const double diagram = exact_cumulant(h, m);
      CHECK(diagram == doctest::Approx(oracle).epsilon(1e-10));
    }
  }
}

TEST_CASE("exact_cumulant matches the brute-force loop nest") {
  RngStream rng(41, 2);
  for (int q : {2, 3}) {
    const auto h = testing::random_kernel(q, q == 2 ? 4 : 3, rng);
    for (int m : {3, 4}) {
      if ((q * m) % 2 != 0) continue;
      CHECK(exact_cumulant(h, m) ==
            doctest::Approx(testing::exact_cumulant_brute(h, m)).epsilon(1e-10));
    }
  }
}

TEST_CASE("partition counts cross-check the quadratic-form identity") {
  // cum_m of H_2(Z) counts the diagrams one-to-one: |Pi(2[m])| = 2^{m-1}(m-1)!
  Eigen::MatrixXd unit = Eigen::MatrixXd::Identity(1, 1);
  for (int m = 2; m <= 7; ++m)
    CHECK(count_partitions(2, m).convert_to<double>() ==
          doctest::Approx(quadratic_form_cumulant(unit, m)).epsilon(1e-12));
}

TEST_CASE("cum_3 vanishes for symmetric spectra") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -1.0;
  CHECK(quadratic_form_cumulant(a, 3) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(exact_cumulant(matrix_to_kernel(a), 3) == doctest::Approx(0.0));
}

TEST_CASE("multilinearity: cum_m(c h) = c^m cum_m(h)") {
  RngStream rng(43, 3);
  const auto h = testing::random_kernel(2, 4, rng);
  SymmetricKernel scaled(2, 4);
  const double c = 0.75;
  for (const auto& [key, v] : h.entries()) scaled.set(key, c * v);
  for (int m : {3, 4, 5}) {
    CHECK(exact_cumulant(scaled, m) ==
          doctest::Approx(std::pow(c, m) * exact_cumulant(h, m)).epsilon(1e-11));
  }
}

TEST_CASE("quadratic_form_cumulant examples") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 1.0;
  CHECK(quadratic_form_cumulant(a, 3) == doctest::Approx(8.0));
  CHECK(quadratic_form_cumulant(Eigen::MatrixXd::Zero(3, 3), 4) == 0.0);
  Eigen::MatrixXd bad(2, 2);
  bad << 0, 1, -1, 0;
  CHECK_THROWS_AS(quadratic_form_cumulant(bad, 3), std::invalid_argument);
}

TEST_CASE("cumulant_bound values") {
  // K = 1 collapses the K power
  const auto b = cumulant_bound(3, 4, 1.0);
  CHECK(b.value == doctest::Approx(std::pow(24.0, 1.5) * std::pow(3.0, 9.0)).epsilon(1e-12));
  // q=2, m=3, K=1/2: 6 * 8 / sqrt(2)
  CHECK(cumulant_bound(2, 3, 0.5).value ==
        doctest::Approx(48.0 / std::sqrt(2.0)).epsilon(1e-12));
  // monotone non-decreasing in K
  double prev = 0.0;
  for (double k : {0.1, 0.3, 0.5, 0.7, 1.0}) {
    const double v = cumulant_bound(2, 4, k).value;
    CHECK(v >= prev);
    prev = v;
  }
  CHECK_THROWS_AS(cumulant_bound(2, 3, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(cumulant_bound(2, 2, 0.5), std::invalid_argument);
}

TEST_CASE("per_term_bound_check: Hermite-sum and atom kernels") {
  // q=2, n=4: K = 1/2, L(2,3) = 1, every term <= 0.5
  const auto hs = hermite_sum_kernel(2, 4);
  const auto summary = per_term_bound_check(hs, 3);
  CHECK(summary.sigma_count == 8);
  CHECK(summary.bound == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(summary.violations == 0);
  CHECK(summary.max_abs_term <= 0.5 + 1e-12);

  // atom q=2: all 8 terms equal 1 = K^L with K = 1
  const auto a = atom(2);
  double total = 0.0;
  const auto s2 = per_term_bound_check(a, 3, [&](const PairPartition&, double term,
                                                 double bound) {
    CHECK(term == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(bound == doctest::Approx(1.0).epsilon(1e-13));
    total += term;
    return true;
  });
  CHECK(s2.sigma_count == 8);
  CHECK(total == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(s2.violations == 0);
}

TEST_CASE("cumulant bound chain on random kernels") {
  RngStream rng(47, 4);
  for (int q : {2, 3}) {
    const auto h = testing::random_kernel(q, 3, rng);
    const double K = compute_K(h);
    for (int m = 3; m <= 5; ++m) {
      if ((q * m) % 2 != 0) continue;
      const double cum = std::abs(exact_cumulant(h, m));
      const double midway =
          count_partitions(q, m).convert_to<double>() *
          std::pow(K, matching_lower_bound(q, m));
      CHECK(cum <= midway * (1 + 1e-12) + 1e-12);
      CHECK(midway <= cumulant_bound(q, m, K).value * (1 + 1e-12));
    }
  }
}

TEST_CASE("L_from_cum4") {
  CHECK(L_from_cum4(2, 0.0) == 0.0);
  // q=3: cum4 = 432/n gives 2/sqrt(3n)
  for (double n : {3.0, 12.0, 48.0}) {
    CHECK(L_from_cum4(3, 432.0 / n) ==
          doctest::Approx(2.0 / std::sqrt(3.0 * n)).epsilon(1e-13));
  }
  bool clamped = false;
  CHECK(L_from_cum4(2, -1e-12, &clamped) == 0.0);
  CHECK(clamped);
  CHECK_THROWS_AS(L_from_cum4(2, -1e-6), std::domain_error);

  // K <= L on random q=2 kernels (exact cum4 through the diagram formula)
  RngStream rng(53, 5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto h = testing::random_kernel(2, 4, rng);
    const double K = compute_K(h);
    const double L = L_from_cum4(2, exact_cumulant(h, 4));
    CHECK(K <= L + 1e-12);
  }
}

TEST_CASE("empirical_cumulants basics") {
  std::vector<double> constant(100, 3.25);
  const auto est = empirical_cumulants(constant, 3);
  CHECK(est[0].value == doctest::Approx(3.25));
  CHECK(est[1].value == 0.0);
  CHECK(est[2].value == 0.0);
  CHECK_THROWS_AS(empirical_cumulants(std::vector<double>(10, 1.0), 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(empirical_cumulants(constant, 7), std::invalid_argument);
}

TEST_CASE("empirical_cumulants on standard normal and H2 samples") {
  RngStream rng(59, 6);
  std::vector<double> normal(1000000);
  for (auto& v : normal) v = rng.normal();
  EmpiricalOptions opts;
  opts.bootstrap_rounds = 40;
  const auto est = empirical_cumulants(normal, 4, opts);
  CHECK(std::abs(est[1].value - 1.0) <= 3 * est[1].std_error);
  CHECK(std::abs(est[3].value) <= 3 * est[3].std_error);  // Gaussian cum4 = 0

  std::vector<double> h2(200000);
  for (auto& v : h2) {
    const double z = rng.normal();
    v = z * z - 1.0;
  }
  const auto est2 = empirical_cumulants(h2, 3, opts);
  CHECK(std::abs(est2[2].value - 8.0) <= 3 * est2[2].std_error);  // cum3(H2) = 8
  CHECK(est2[2].std_error > 0.0);
  CHECK(!est2[2].biased);
}

TEST_CASE("empirical_cumulants orders 5 and 6 are flagged biased") {
  RngStream rng(61, 7);
  std::vector<double> xs(5000);
  for (auto& v : xs) v = rng.normal();
  EmpiricalOptions opts;
  opts.bootstrap_rounds = 20;
  const auto est = empirical_cumulants(xs, 6, opts);
  CHECK(!est[3].biased);
  CHECK(est[4].biased);
  CHECK(est[5].biased);
}
