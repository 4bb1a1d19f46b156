#include "wchaos/applications.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wchaos/errors.hpp"

namespace wchaos {

// --- Brownian sheet -------------------------------------------------------

BrownianSheetModel::BrownianSheetModel(int d, long long n) : dimension(d), cutoff(n) {
  if (d < 1) throw std::invalid_argument("sheet dimension must be >= 1");
  if (n < 2) throw std::invalid_argument("sheet cutoff n must be >= 2");
}

double BrownianSheetModel::mean() const {
  return std::pow(std::log(static_cast<double>(cutoff)), dimension);
}

double BrownianSheetModel::variance() const {
  const double n = static_cast<double>(cutoff);
  return 2.0 * std::pow(2.0 * std::log(n) - 2.0 * (1.0 - 1.0 / n), dimension);
}

double BrownianSheetModel::k_bound() const {
  return 2.0 * std::pow(120.0 / std::log(static_cast<double>(cutoff)), dimension / 2.0);
}

DeviationParams BrownianSheetModel::deviation() const {
  DeviationParams p;
  p.q = 2;
  p.gamma = 0.0;
  p.alpha = 0.5;
  p.K = k_bound();
  p.delta = std::pow(std::log(static_cast<double>(cutoff)) / 120.0, dimension / 4.0) /
            (8.0 * std::sqrt(2.0));
  return p;
}

double sheet_kernel_value(int d, long long n, std::span<const double> t,
                          std::span<const double> s) {
  if (d < 1 || n < 2) throw std::invalid_argument("need d >= 1 and n >= 2");
  if (t.size() != static_cast<std::size_t>(d) || s.size() != static_cast<std::size_t>(d))
    throw std::invalid_argument("point dimension mismatch");
  double value = 1.0;
  for (int i = 0; i < d; ++i) {
    if (!(t[i] >= 0.0 && t[i] <= 1.0 && s[i] >= 0.0 && s[i] <= 1.0))
      throw std::invalid_argument("coordinates must lie in [0,1]");
    value *= 1.0 / std::max({t[i], s[i], 1.0 / static_cast<double>(n)}) - 1.0;
  }
  return value;
}

namespace {

// 5-point Gauss-Legendre nodes/weights on [-1,1].
constexpr double kGlNode[5] = {-0.9061798459386639928, -0.5384693101056830910, 0.0,
                               0.5384693101056830910, 0.9061798459386639928};
constexpr double kGlWeight[5] = {0.2369268850561890875, 0.4786286704993664681,
                                 0.5688888888888888889, 0.4786286704993664681,
                                 0.2369268850561890875};

template <class F>
double gl_panel(const F& f, double x0, double x1, double y0, double y1) {
  const double hx = 0.5 * (x1 - x0), cx = 0.5 * (x1 + x0);
  const double hy = 0.5 * (y1 - y0), cy = 0.5 * (y1 + y0);
  double acc = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      acc += kGlWeight[i] * kGlWeight[j] * f(cx + hx * kGlNode[i], cy + hy * kGlNode[j]);
  return acc * hx * hy;
}

template <class F>
double adapt_panel(const F& f, double x0, double x1, double y0, double y1,
                   double parent, double tol, int depth) {
  const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
  const double q00 = gl_panel(f, x0, xm, y0, ym);
  const double q01 = gl_panel(f, x0, xm, ym, y1);
  const double q10 = gl_panel(f, xm, x1, y0, ym);
  const double q11 = gl_panel(f, xm, x1, ym, y1);
  const double refined = q00 + q01 + q10 + q11;
  if (depth >= 12 || std::abs(refined - parent) <= tol) return refined;
  return adapt_panel(f, x0, xm, y0, ym, q00, tol / 4, depth + 1) +
         adapt_panel(f, x0, xm, ym, y1, q01, tol / 4, depth + 1) +
         adapt_panel(f, xm, x1, y0, ym, q10, tol / 4, depth + 1) +
         adapt_panel(f, xm, x1, ym, y1, q11, tol / 4, depth + 1);
}

template <class F>
double adaptive_quad_2d(const F& f, std::span<const double> cuts, double rel_tol) {
  // initial panels aligned with the supplied cut lines (the 1/n kink)
  double coarse = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
      coarse += gl_panel(f, cuts[i], cuts[i + 1], cuts[j], cuts[j + 1]);
  const double tol = rel_tol * std::max(std::abs(coarse), 1e-300);
  double total = 0.0;
  const std::size_t panels = (cuts.size() - 1) * (cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      const double parent = gl_panel(f, cuts[i], cuts[i + 1], cuts[j], cuts[j + 1]);
      total += adapt_panel(f, cuts[i], cuts[i + 1], cuts[j], cuts[j + 1], parent,
                           tol / static_cast<double>(panels), 0);
    }
  return total;
}

}  // namespace

double sheet_variance_quadrature(int d, long long n, double rel_tol) {
  if (d < 1 || n < 2) throw std::invalid_argument("need d >= 1 and n >= 2");
  const double a = 1.0 / static_cast<double>(n);
  const auto f = [n](double t, double s) {
    const double k = 1.0 / std::max({t, s, 1.0 / static_cast<double>(n)}) - 1.0;
    return k * k;
  };
  const double cuts[] = {0.0, a, std::min(1.0, 8.0 * a), 1.0};
  const std::size_t ncuts = (8.0 * a < 1.0) ? 4 : 3;
  const double factor = adaptive_quad_2d(f, std::span<const double>(cuts, ncuts), rel_tol);
  // the kernel is a product over coordinates, so |h^{(d)}|^2 = factor^d
  return 2.0 * std::pow(factor, d);
}

double sheet_discretized_K(long long n, int grid_points) {
  if (n < 2) throw std::invalid_argument("need n >= 2");
  if (grid_points < 16) throw std::invalid_argument("grid too small");
  const double a = 1.0 / static_cast<double>(n);
  // graded grid: uniform cells on [0, 1/n], geometric cells on [1/n, 1]
  std::vector<double> edges;
  const int inner = grid_points / 4;
  for (int i = 0; i <= inner; ++i) edges.push_back(a * i / inner);
  const int outer = grid_points - inner;
  for (int i = 1; i <= outer; ++i)
    edges.push_back(a * std::pow(1.0 / a, static_cast<double>(i) / outer));
  const int cells = static_cast<int>(edges.size()) - 1;
  Eigen::VectorXd mid(cells), w(cells);
  for (int i = 0; i < cells; ++i) {
    mid(i) = 0.5 * (edges[i] + edges[i + 1]);
    w(i) = edges[i + 1] - edges[i];
  }
  Eigen::MatrixXd A(cells, cells);
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j)
      A(i, j) = (1.0 / std::max({mid(i), mid(j), a}) - 1.0) * std::sqrt(w(i) * w(j));
  const double norm2 = A.squaredNorm();
  const Eigen::MatrixXd A2 = A * A;
  return std::sqrt(A2.squaredNorm()) / norm2;
}

// --- Fractional Brownian motion -------------------------------------------

double fbm_increment_cov(double hurst, long long k) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("need 0 < H < 1");
  const double kk = std::abs(static_cast<double>(k));
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(kk + 1.0, h2) + std::pow(std::abs(kk - 1.0), h2) -
                2.0 * std::pow(kk, h2));
}

double fbm_sigma_squared(double hurst, long long n) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  if (!(hurst > 0.0 && hurst <= 0.75))
    throw std::invalid_argument("need 0 < H <= 3/4");
  // Toeplitz structure: sum_{j,k} rho(j-k)^2 = n + 2 sum_k (n-k) rho(k)^2
  double acc = static_cast<double>(n);
  for (long long k = 1; k < n; ++k) {
    const double r = fbm_increment_cov(hurst, k);
    acc += 2.0 * static_cast<double>(n - k) * r * r;
  }
  return acc;
}

double fbm_sigma(double hurst, long long n) {
  return std::sqrt(fbm_sigma_squared(hurst, n));
}

double fbm_rate(double hurst, long long n, double c_h) {
  if (!(hurst > 0.0 && hurst <= 0.75))
    throw std::invalid_argument("need 0 < H <= 3/4 (no CLT above 3/4)");
  if (n < 2) throw std::invalid_argument("need n >= 2");
  if (!(c_h > 0.0)) throw std::invalid_argument("c_H must be positive");
  const double nn = static_cast<double>(n);
  double shape;
  if (hurst < 0.625)
    shape = 1.0 / std::sqrt(nn);
  else if (hurst == 0.625)
    shape = std::pow(std::log(nn), 1.5) / std::sqrt(nn);
  else if (hurst < 0.75)
    shape = std::pow(nn, 4.0 * hurst - 3.0);
  else
    shape = 1.0 / std::log(nn);
  return c_h * shape;
}

DeviationParams fbm_deviation(double hurst, long long n, double c_h) {
  const double a_n = fbm_rate(hurst, n, c_h);
  DeviationParams p;
  p.q = 2;
  p.gamma = 0.0;
  p.alpha = 0.5;
  p.K = a_n / (2.0 * std::sqrt(2.0));  // proof-side bound on the contraction norm
  p.delta = std::pow(2.0, -2.25) / std::sqrt(a_n);
  p.constants_unspecified = true;  // everything scales with the free c_H
  return p;
}

FbmModel::FbmModel(double hurst_, long long n) : hurst(hurst_), steps(n) {
  if (!(hurst > 0.0 && hurst <= 0.75))
    throw std::invalid_argument("need 0 < H <= 3/4");
  if (n < 1) throw std::invalid_argument("need n >= 1");
}

Eigen::MatrixXd FbmModel::increment_covariance() const {
  if (steps > 4096)
    throw CapExceeded("dense covariance factorization limited to n <= 4096");
  Eigen::MatrixXd r(steps, steps);
  for (long long i = 0; i < steps; ++i)
    for (long long j = 0; j < steps; ++j) r(i, j) = increment_cov(i - j);
  return r;
}

double hurst_estimate(double s_n, long long n) {
  if (!(s_n > 0.0)) throw std::invalid_argument("quadratic variation must be positive");
  if (n < 2) throw std::invalid_argument("need n >= 2");
  return 0.5 - std::log(s_n) / (2.0 * std::log(static_cast<double>(n)));
}

double hurst_error_from_chaos(double f_n, double sigma_n, long long n) {
  if (n < 2) throw std::invalid_argument("need n >= 2");
  return -std::log1p(sigma_n * f_n / static_cast<double>(n)) /
         (2.0 * std::log(static_cast<double>(n)));
}

// --- Spherical bispectrum --------------------------------------------------

namespace {

void validate_triple(long long l1, long long l2, long long l3) {
  if (l1 < 0 || l2 < 0 || l3 < 0)
    throw std::invalid_argument("frequencies must be non-negative");
  if (!(l1 <= l2 && l2 <= l3))
    throw std::invalid_argument("frequencies must satisfy l1 <= l2 <= l3");
  if ((l1 + l2 + l3) % 2 != 0)
    throw std::invalid_argument("l1 + l2 + l3 must be even");
  if (l3 > l1 + l2 || l1 < l3 - l2)
    throw std::invalid_argument("triangle condition violated");
}

}  // namespace

int bispectrum_variance_factor(long long l1, long long l2, long long l3) {
  validate_triple(l1, l2, l3);
  return 1 + (l1 == l2 ? 1 : 0) + (l2 == l3 ? 1 : 0) + (l1 == l3 ? 3 : 0);
}

BispectrumModel::BispectrumModel(long long a, long long b, long long c)
    : l1(a), l2(b), l3(c) {
  validate_triple(l1, l2, l3);
}

BispectrumModel BispectrumModel::from_sequence(long long n, long long u, long long v) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  if (!(n <= u && u <= v && v <= 2 * n))
    throw std::invalid_argument("need n <= u <= v <= 2n");
  if ((n + u + v) % 2 != 0) throw std::invalid_argument("n + u + v must be even");
  return BispectrumModel(n, u, v);
}

DeviationParams bispectrum_deviation(long long n) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  const double l_bound = 2.0 / std::sqrt(3.0 * static_cast<double>(n));
  DeviationParams p = delta_from_L(3, l_bound);
  return p;
}

}  // namespace wchaos
