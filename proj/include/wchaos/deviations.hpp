#pragma once

// Deviation parameters and tail/ratio bounds for order-q chaos elements:
// the scale Delta = (q^{3q/2} K^{alpha(q)})^{-1}, the Gaussian rate function
// z^2/(2 q!), the two-branch exponential tail bound, the comparison against
// the classical Weibull-type tail estimate, and trend diagnostics for the
// admissible scale window. Constants the source results leave unspecified
// (c, C, c0..c2, c_H) are explicit caller inputs, defaulted to 1 and flagged
// in every output.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wchaos/bigmath.hpp"

namespace wchaos {

struct DeviationParams {
  int q = 2;
  double gamma = 0.0;                  // q/2 - 1
  std::optional<double> K;             // maximal contraction norm (or bound)
  std::optional<double> L;             // cum4 surrogate
  double alpha = 0.0;                  // alpha(q)
  double delta = 0.0;                  // +inf when unbounded
  bool delta_unbounded = false;        // K (or L) was exactly zero
  bool constants_unspecified = false;  // value depends on a free constant
};

// Delta = (q^{3q/2} K^{alpha(q)})^{-1}; K = 0 yields the unbounded marker.
DeviationParams delta_from_K(int q, double K);

// Same formula with the cum4 surrogate L in place of K; L may exceed 1.
DeviationParams delta_from_L(int q, double L);

// Gaussian rate function I(z) = z^2 / (2 q!).
double rate_function(double z, int q);

// 2 exp(-(1/4) min(z^2/2^{q/2}, (z Delta)^{2/q})), valid for all z >= 0.
double tail_bound(double z, int q, double delta);

// c exp(-(1/2) (z/sqrt(q!))^{2/q}); the constant c is caller-supplied.
double major_bound(double z, int q, double c);

// True when the two-branch bound improves on the Weibull-type one.
bool tail_beats_major(double z, int q, double delta, double c);

struct RatioDiagnostic {
  double log_ratio_abs = 0.0;  // |log(p / (1 - Phi_{q!}(z)))|
  double shape = 0.0;          // (1 + (z/sqrt(q!))^3) / Delta^{1/(q-1)}
  bool constants_unspecified = true;  // c0, c1, c2 are never pinned
};
RatioDiagnostic ratio_diagnostic(double p_tail, double z, int q, double delta);

// 1 - Phi_{sigma^2}(z) via the complementary error function.
double gaussian_tail(double z, double sigma_sq);

// Lower tail envelope C exp(-c n^{1/q} z^{2/q}) for the Hermite-sum model.
double hermite_sum_tail_lower(double n, double z, int q, double C, double c);

// Delta^{-1/(1+2 gamma)}, the constant-free normal-approximation shape.
double berry_esseen_shape(double delta, double gamma);

struct ScaleSequence {
  std::vector<double> index;   // n grid, increasing
  std::vector<double> value;   // a_n, positive, eventually increasing
  std::string descriptor;      // e.g. "n^0.3"
};

enum class MdpVerdict { Window, NoWindow, Indeterminate };

// Log-log slope trend classification of a scale sequence against the
// admissible window. Trend evidence only; no limit is claimed.
struct MdpScaleReport {
  MdpVerdict verdict = MdpVerdict::Indeterminate;
  double ratio_slope = 0.0;       // slope of log(a / Delta^{1/(q-1)}) vs log n
  double scale_slope = 0.0;       // slope of log a vs log n
  double no_window_exponent = 0;  // 1/(2q-2)
  double dead_band = 0.02;
};
MdpScaleReport mdp_scale_check(const ScaleSequence& a, std::span<const double> delta,
                               int q);

}  // namespace wchaos
