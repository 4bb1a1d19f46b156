#pragma once

// The three worked models:
//  - explosive integrals of a d-dimensional Brownian sheet (q = 2): product
//    kernel max(t_i, s_i, 1/n)^{-1} - 1, mean (log n)^d, closed-form
//    variance, K bound 2 (120/log n)^{d/2}, Delta = (1/(8 sqrt 2)) (log n/120)^{d/4};
//  - second Hermite power variation of fractional Brownian motion (q = 2):
//    increment correlation rho_H, normalization sigma_n with Var F_n = 2,
//    rate A_n in four Hurst regimes, Delta = 2^{-9/4} A_n^{-1/2}, and the
//    Hurst estimator error identity;
//  - spherical sample-bispectrum parameters (q = 3): variance factor D and
//    Delta = 3^{-9/2} (sqrt(3n)/2)^{5/12}. Parameters only; no spherical
//    harmonics are sampled.

#include <span>

#include <Eigen/Core>

#include "wchaos/deviations.hpp"

namespace wchaos {

// --- Brownian sheet -------------------------------------------------------

struct BrownianSheetModel {
  int dimension = 1;
  long long cutoff = 2;  // n

  BrownianSheetModel(int d, long long n);
  double mean() const;       // (log n)^d
  double variance() const;   // 2 (2 log n - 2(1 - 1/n))^d
  double k_bound() const;    // 2 (120/log n)^{d/2}
  DeviationParams deviation() const;
};

// Product kernel value; coordinates must lie in [0,1]^d.
double sheet_kernel_value(int d, long long n, std::span<const double> t,
                          std::span<const double> s);

// 2 |h_n^{(d)}|^2 by adaptive panel quadrature with subdivision at the 1/n
// kink (the d-fold power uses the kernel's product structure).
double sheet_variance_quadrature(int d, long long n, double rel_tol = 1e-5);

// Discretized K for d = 1 on a graded midpoint grid: sqrt(tr A^4)/tr A^2.
double sheet_discretized_K(long long n, int grid_points = 400);

// --- Fractional Brownian motion -------------------------------------------

// rho_H(k) = ((|k|+1)^{2H} + ||k|-1|^{2H} - 2|k|^{2H}) / 2, for 0 < H < 1.
double fbm_increment_cov(double hurst, long long k);

// sigma_n^2 = sum_{j,k<n} rho_H(j-k)^2, so Var((1/sigma_n) sum H_2) = 2.
// Exactly n at H = 1/2 (independent increments).
double fbm_sigma_squared(double hurst, long long n);
double fbm_sigma(double hurst, long long n);

// A_n = c_H * {n^{-1/2}; (log n)^{3/2} n^{-1/2}; n^{4H-3}; (log n)^{-1}}
// on H < 5/8, H = 5/8, 5/8 < H < 3/4, H = 3/4. c_H is caller-supplied.
double fbm_rate(double hurst, long long n, double c_h);

// Delta = 2^{-9/4} A_n^{-1/2}, consistent with delta_from_K(2, A_n/(2 sqrt 2)).
DeviationParams fbm_deviation(double hurst, long long n, double c_h);

struct FbmModel {
  double hurst = 0.5;
  long long steps = 1;  // n

  FbmModel(double hurst, long long n);
  double increment_cov(long long k) const { return fbm_increment_cov(hurst, k); }
  double sigma() const { return fbm_sigma(hurst, steps); }
  double rate(double c_h = 1.0) const { return fbm_rate(hurst, steps, c_h); }
  DeviationParams deviation(double c_h = 1.0) const {
    return fbm_deviation(hurst, steps, c_h);
  }
  // n x n Toeplitz covariance of the unit-spaced increments.
  Eigen::MatrixXd increment_covariance() const;
};

// H_n = 1/2 - log(s_n)/(2 log n) from the quadratic variation s_n > 0.
double hurst_estimate(double s_n, long long n);

// Estimator error identity: H_n - H = -log(sigma_n F_n / n + 1)/(2 log n).
double hurst_error_from_chaos(double f_n, double sigma_n, long long n);

// --- Spherical bispectrum --------------------------------------------------

// D = 1 + 1{l1=l2} + 1{l2=l3} + 3*1{l1=l3} under l1 <= l2 <= l3 with the
// triangle and parity conditions enforced.
int bispectrum_variance_factor(long long l1, long long l2, long long l3);

struct BispectrumModel {
  long long l1 = 0, l2 = 0, l3 = 0;

  BispectrumModel(long long l1, long long l2, long long l3);
  // Frequency triple (n, u_n, v_n) with n <= u_n <= v_n <= 2n, n+u+v even.
  static BispectrumModel from_sequence(long long n, long long u, long long v);
  int variance_factor() const { return bispectrum_variance_factor(l1, l2, l3); }
};

// q = 3 parameters with Delta = 3^{-9/2} (sqrt(3n)/2)^{5/12} via the cum4
// bound L_n <= 2/sqrt(3n).
DeviationParams bispectrum_deviation(long long n);

}  // namespace wchaos
