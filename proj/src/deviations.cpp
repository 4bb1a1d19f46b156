#include "wchaos/deviations.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wchaos/diagrams.hpp"

namespace wchaos {

namespace {

double factorial_d(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

DeviationParams delta_common(int q, double value, bool is_L) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  DeviationParams p;
  p.q = q;
  p.gamma = q / 2.0 - 1.0;
  p.alpha = alpha_value(q);
  if (is_L)
    p.L = value;
  else
    p.K = value;
  if (value == 0.0) {
    p.delta_unbounded = true;
    p.delta = std::numeric_limits<double>::infinity();
    return p;
  }
  p.delta = 1.0 / (std::pow(static_cast<double>(q), 1.5 * q) * std::pow(value, p.alpha));
  return p;
}

// least-squares slope of y against x
double slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

DeviationParams delta_from_K(int q, double K) {
  if (!(K >= 0.0 && K <= 1.0))
    throw std::invalid_argument("K must lie in [0,1] for a normalized kernel");
  return delta_common(q, K, false);
}

DeviationParams delta_from_L(int q, double L) {
  if (!(L >= 0.0)) throw std::invalid_argument("L must be non-negative");
  return delta_common(q, L, true);
}

double rate_function(double z, int q) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  return z * z / (2.0 * factorial_d(q));
}

double tail_bound(double z, int q, double delta) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  if (z < 0.0) throw std::invalid_argument("z must be non-negative");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  const double gaussian_branch = z * z / std::pow(2.0, q / 2.0);
  const double weibull_branch = std::pow(z * delta, 2.0 / q);
  return 2.0 * std::exp(-0.25 * std::min(gaussian_branch, weibull_branch));
}

double major_bound(double z, int q, double c) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  if (z < 0.0) throw std::invalid_argument("z must be non-negative");
  if (!(c > 0.0)) throw std::invalid_argument("constant c must be positive");
  return c * std::exp(-0.5 * std::pow(z / std::sqrt(factorial_d(q)), 2.0 / q));
}

bool tail_beats_major(double z, int q, double delta, double c) {
  return tail_bound(z, q, delta) < major_bound(z, q, c);
}

RatioDiagnostic ratio_diagnostic(double p_tail, double z, int q, double delta) {
  if (!(p_tail > 0.0 && p_tail < 1.0))
    throw std::invalid_argument("p_tail must lie in (0,1)");
  if (z < 0.0) throw std::invalid_argument("z must be non-negative");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  RatioDiagnostic d;
  const double reference = gaussian_tail(z, factorial_d(q));
  d.log_ratio_abs = std::abs(std::log(p_tail / reference));
  const double zs = z / std::sqrt(factorial_d(q));
  d.shape = (1.0 + zs * zs * zs) / std::pow(delta, 1.0 / (q - 1));
  return d;
}

double gaussian_tail(double z, double sigma_sq) {
  if (!(sigma_sq > 0.0)) throw std::invalid_argument("sigma^2 must be positive");
  return 0.5 * std::erfc(z / std::sqrt(2.0 * sigma_sq));
}

double hermite_sum_tail_lower(double n, double z, int q, double C, double c) {
  if (!(C > 0.0 && c > 0.0))
    throw std::invalid_argument("constants C and c must be positive");
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  if (n < 1.0 || z < 0.0) throw std::invalid_argument("need n >= 1 and z >= 0");
  return C * std::exp(-c * std::pow(n, 1.0 / q) * std::pow(z, 2.0 / q));
}

double berry_esseen_shape(double delta, double gamma) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (gamma < 0.0) throw std::invalid_argument("gamma must be non-negative");
  return std::pow(delta, -1.0 / (1.0 + 2.0 * gamma));
}

MdpScaleReport mdp_scale_check(const ScaleSequence& a, std::span<const double> delta,
                               int q) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  const std::size_t n = a.index.size();
  if (n < 4) throw std::invalid_argument("scale grid too short: need >= 4 points");
  if (a.value.size() != n || delta.size() != n)
    throw std::invalid_argument("grid lengths must agree");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(a.index[i] > 0.0 && a.value[i] > 0.0 && delta[i] > 0.0))
      throw std::invalid_argument("grids must be positive");
    if (i > 0 && a.index[i] <= a.index[i - 1])
      throw std::invalid_argument("index grid must be increasing");
  }
  if (a.value[n - 1] <= a.value[n - 2])
    throw std::invalid_argument("a_n must be increasing at the end of the grid");

  std::vector<double> log_n(n), log_ratio(n), log_a(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_n[i] = std::log(a.index[i]);
    log_a[i] = std::log(a.value[i]);
    log_ratio[i] = log_a[i] - std::log(delta[i]) / (q - 1);
  }

  MdpScaleReport report;
  report.ratio_slope = slope(log_n, log_ratio);
  report.scale_slope = slope(log_n, log_a);
  report.no_window_exponent = 1.0 / (2.0 * q - 2.0);
  if (report.ratio_slope < -report.dead_band)
    report.verdict = MdpVerdict::Window;
  else if (report.scale_slope > report.no_window_exponent + report.dead_band)
    report.verdict = MdpVerdict::NoWindow;
  else
    report.verdict = MdpVerdict::Indeterminate;
  return report;
}

}  // namespace wchaos
