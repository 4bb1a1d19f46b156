#pragma once

// Exact cumulants of order-q chaos elements via the diagram formula,
//
//   cum_m(I_q(h)) = sum over sigma in Pi(q[m]) of the block-identified
//                   coefficient sum of h^{(x) m},
//
// together with the independent quadratic-form oracle for q = 2, the
// per-diagram and aggregate bounds K^{L(q,m)} and
// (m!)^{q/2} (q^{3q/2})^{m-2} K^{alpha(q)(m-2)}, and empirical cumulant
// estimation from samples.
//
// Because h is symmetric, the value of a diagram depends on sigma only
// through the multigraph G_sigma. Exact cumulants are therefore evaluated
// per labeled multigraph class (sum over edge-index assignments, contracted
// vertex by vertex in a greedy order) and weighted by the number of sigma
// mapping to that class. Enumeration-based per-sigma checks remain available
// and share term values through a class memo.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wchaos/bigmath.hpp"
#include "wchaos/diagrams.hpp"
#include "wchaos/kernels.hpp"

namespace wchaos {

struct CumulantOptions {
  std::size_t dense_cap = kDefaultDenseCap;  // cap on N^q dense kernel size
  int max_order = 8;                         // cap on m
  EnumerationOptions enumeration{};          // per-sigma paths only
};

// All connected loop-free q-regular multigraphs on m labeled vertices,
// with the number of pair partitions inducing each.
struct MultigraphClass {
  DiagramMultigraph graph;
  BigInt sigma_count;
};
std::vector<MultigraphClass> multigraph_classes(int q, int m);

// Number of sigma in Pi(q[m]) with G_sigma equal to the given labeled graph:
// prod_v q!/prod_u mu(v,u)! * prod_{u<v} mu(u,v)!.
BigInt partitions_per_class(const DiagramMultigraph& g, int q);

// Value of one diagram: sum over assignments of an index in 1..N to every
// edge of prod_v h(multiset of indices at v's edges).
double diagram_term(const SymmetricKernel& h, const DiagramMultigraph& g,
                    const CumulantOptions& options = {});

// cum_m(I_q(h)). m = 1 gives 0, m = 2 gives q!|h|^2, odd qm gives 0.
double exact_cumulant(const SymmetricKernel& h, int m,
                      const CumulantOptions& options = {});

// Independent oracle: cum_m(Z^T A Z - tr A) = 2^{m-1} (m-1)! sum_i lambda_i^m
// for symmetric A. Classical identity, not derived from the diagram formula.
double quadratic_form_cumulant(const Eigen::MatrixXd& a, int m);

// q = 2 kernels are symmetric matrices; conversions for the oracle path.
Eigen::MatrixXd kernel_to_matrix(const SymmetricKernel& h);
SymmetricKernel matrix_to_kernel(const Eigen::MatrixXd& a);

struct CumulantBound {
  double log_value = 0.0;  // natural log, finite for every valid input
  double value = 0.0;      // +inf when the plain value overflows
};
// (m!)^{q/2} (q^{3q/2})^{m-2} K^{alpha(q)(m-2)} for K in [0,1], m >= 3.
CumulantBound cumulant_bound(int q, int m, double K);

struct TermCheckSummary {
  std::uint64_t sigma_count = 0;
  double bound = 0.0;      // K^{L(q,m)}
  double max_abs_term = 0.0;
  std::uint64_t violations = 0;  // |term| > bound + 1e-12
};

// Streams (sigma, term, bound) over Pi(q[m]) for normalized h; terms are
// memoized per multigraph class. A null visitor just accumulates the summary.
TermCheckSummary per_term_bound_check(
    const SymmetricKernel& h, int m,
    const std::function<bool(const PairPartition&, double term, double bound)>& visit =
        nullptr,
    const CumulantOptions& options = {});

// L = (q q!)^{-1} sqrt(cum4). Small negative cum4 (> -1e-9) clamps to zero
// with *clamped set; anything more negative throws.
double L_from_cum4(int q, double cum4, bool* clamped = nullptr);

struct CumulantEstimate {
  int order = 0;
  double value = 0.0;
  double std_error = 0.0;
  bool biased = false;  // orders 5 and 6 use plug-in moment formulas
};

struct EmpiricalOptions {
  int bootstrap_rounds = 100;
  std::uint64_t seed = 0x5eedULL;
};

// Unbiased k-statistics for orders 1..4, central-moment plug-in for 5 and 6,
// bootstrap standard errors. Requires at least 10*max_order samples.
std::vector<CumulantEstimate> empirical_cumulants(std::span<const double> samples,
                                                  int max_order,
                                                  const EmpiricalOptions& options = {});

// Per-order record combining exact, empirical and bound values.
struct CumulantReport {
  int q = 0;
  int m = 0;
  std::optional<double> exact;
  std::optional<double> empirical;
  std::optional<double> std_error;
  std::optional<double> term_bound;       // K^{L(q,m)}
  std::optional<double> aggregate_bound;  // cumulant_bound(q,m,K)
};

}  // namespace wchaos
