#pragma once

// Sampling of chaos elements via Hermite/Wick evaluation, tail and cumulant
// estimation, and scaled log-tail diagnostics. Everything is deterministic
// given an RngSpec: work splits into fixed-size blocks with derived
// sub-streams, so results are bit-identical for any worker count.

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "wchaos/applications.hpp"
#include "wchaos/kernels.hpp"
#include "wchaos/rng.hpp"

namespace wchaos {

// Probabilists' Hermite polynomial by the three-term recurrence
// H_{k+1}(x) = x H_k(x) - k H_{k-1}(x). Capped at k <= 30 for stability.
double hermite(int k, double x);

// One realization of I_q(h): draw Z_1..Z_N and evaluate
// sum over canonical multisets of coeff * multiplicity * prod_j H_{c_j}(Z_j).
class ChaosSampler {
 public:
  explicit ChaosSampler(SymmetricKernel h);
  int order() const { return kernel_.order(); }
  int dim() const { return kernel_.dim(); }
  const SymmetricKernel& kernel() const { return kernel_; }

  double sample(RngStream& rng) const;
  double evaluate(std::span<const double> z) const;  // deterministic in z

 private:
  struct Term {
    double weight;  // coeff * multiset multiplicity
    std::vector<std::pair<std::uint16_t, int>> factors;  // (index, count)
  };
  SymmetricKernel kernel_;
  std::vector<Term> terms_;
};

// Structural self-test of the Wick evaluation rule: for random symmetric A,
// the q = 2 sampler must agree with Z^T A Z - tr A per sample.
bool verify_wick_rule(std::uint64_t seed = 1, int trials = 32, double tol = 1e-10);

// F_n = (1/sigma_n) sum_{k<n} H_2(X_k) with exact increment covariance,
// sampled through a dense Cholesky factor (ridge 1e-12 fallback flagged).
class FbmSampler {
 public:
  explicit FbmSampler(const FbmModel& model);
  const FbmModel& model() const { return model_; }
  bool ridge_applied() const { return ridge_applied_; }

  double sample(RngStream& rng) const;
  // Matrix-batched variant; draws consume the stream exactly like repeated
  // sample() calls but the linear algebra is blocked.
  void sample_batch(RngStream& rng, std::span<double> out) const;
  // Correlated increments for one path (CSV export path).
  Eigen::VectorXd sample_increments(RngStream& rng) const;

 private:
  FbmModel model_;
  Eigen::MatrixXd chol_;  // lower factor
  double sigma_ = 1.0;
  bool ridge_applied_ = false;
};

// F = n^{-1/2} sum_{k<n} H_q(Z_k). For q = 2 the chi-square identity
// F = (chi^2_n - n)/sqrt(n) replaces the n-fold Wick sum (exact in law).
class HermiteSumSampler {
 public:
  HermiteSumSampler(int q, long long n, bool use_chi_square_identity = true);
  int order() const { return q_; }
  long long terms() const { return n_; }
  bool chi_square_route() const { return chi_square_; }

  double sample(RngStream& rng) const;
  // Exact upper tail P(F >= z), available on the chi-square route only.
  double exact_tail(double z) const;

 private:
  int q_;
  long long n_;
  bool chi_square_;
};

struct TailEstimate {
  double z = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;   // two-sided 95% Clopper-Pearson
  double ci_high = 1.0;  // one-sided (rule of three) when censored
  bool two_sided_event = false;  // event |F| >= z instead of F >= z
  bool censored = false;         // zero hits
  RngSpec rng;
};

using Sampler = std::function<double(RngStream&)>;

// Monte Carlo tail probability with exact binomial confidence interval.
// Requires n_samples >= 100. Deterministic given the RngSpec.
TailEstimate estimate_tail(const Sampler& sampler, double z, std::uint64_t n_samples,
                           const RngSpec& rng, bool two_sided_event = false,
                           int workers = 1);

// One model of the family feeding the scaled log-tail table. Exactly one of
// sampler / exact_tail should be set; exact tails make deep cells computable.
struct MdpModel {
  double n = 0.0;  // family index
  Sampler sampler;
  std::function<double(double)> exact_tail;  // z -> P(F >= z)
  std::string label;
};

struct MdpCell {
  double n = 0.0;
  double a = 0.0;
  double z = 0.0;
  double p = 0.0;           // P(F/a >= z)
  double scaled_log = 0.0;  // a^{-2} log p
  double rate_target = 0.0;  // -z^2/(2 q!)
  std::string method;        // "exact" or "mc"
  bool censored = false;
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
};

struct MdpCurveOptions {
  std::uint64_t samples = 100000;
  RngSpec rng;
  int workers = 1;
};

std::vector<MdpCell> mdp_curve(std::span<const MdpModel> family,
                               std::span<const double> a_grid,
                               std::span<const double> z_grid, int q,
                               const MdpCurveOptions& options = {});

// Throws on duplicate stream ids (tasks must own disjoint streams).
void check_distinct_streams(std::span<const std::uint64_t> streams);

// Runs tasks on `workers` threads; the result vector is keyed by task index,
// so the merged output is independent of scheduling.
template <class R>
std::vector<R> run_batch(const std::vector<std::function<R()>>& tasks, int workers) {
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  std::vector<R> results(tasks.size());
  if (tasks.empty()) return results;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto drain = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        results[i] = tasks[i]();
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const int nthreads = static_cast<int>(
      std::min<std::size_t>(tasks.size(), static_cast<std::size_t>(workers)));
  std::vector<std::thread> pool;
  pool.reserve(nthreads - 1);
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(drain);
  drain();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace wchaos
