#include "wchaos/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <Eigen/Cholesky>

#include "wchaos/reduction.hpp"

namespace wchaos {

double hermite(int k, double x) {
  if (k < 0) throw std::invalid_argument("Hermite index must be non-negative");
  if (k > 30) throw std::invalid_argument("Hermite recurrence capped at k <= 30");
  if (k == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int i = 1; i < k; ++i) {
    const double next = x * cur - i * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

ChaosSampler::ChaosSampler(SymmetricKernel h) : kernel_(std::move(h)) {
  for (const auto& [key, v] : kernel_.entries()) {
    Term t;
    t.weight = v * static_cast<double>(tuple_multiplicity(key));
    for (auto idx : key) {
      if (!t.factors.empty() && t.factors.back().first == idx)
        ++t.factors.back().second;
      else
        t.factors.emplace_back(idx, 1);
    }
    terms_.push_back(std::move(t));
  }
}

double ChaosSampler::evaluate(std::span<const double> z) const {
  if (z.size() != static_cast<std::size_t>(kernel_.dim()))
    throw std::invalid_argument("normal vector length must equal kernel dim");
  double acc = 0.0;
  for (const auto& term : terms_) {
    double prod = term.weight;
    for (const auto& [idx, count] : term.factors) prod *= hermite(count, z[idx]);
    acc += prod;
  }
  return acc;
}

double ChaosSampler::sample(RngStream& rng) const {
  std::vector<double> z(kernel_.dim());
  for (auto& v : z) v = rng.normal();
  return evaluate(z);
}

bool verify_wick_rule(std::uint64_t seed, int trials, double tol) {
  RngStream rng(seed, 0xA11CE);
  const int dim = 4;
  for (int trial = 0; trial < trials; ++trial) {
    Eigen::MatrixXd a(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) a(i, j) = a(j, i) = rng.normal();
    SymmetricKernel h(2, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j)
        h.set({static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j)}, a(i, j));
    const ChaosSampler sampler(h);
    Eigen::VectorXd z(dim);
    for (int i = 0; i < dim; ++i) z(i) = rng.normal();
    const double wick = sampler.evaluate(std::span<const double>(z.data(), dim));
    const double direct = z.dot(a * z) - a.trace();
    if (std::abs(wick - direct) > tol * std::max(1.0, std::abs(direct))) return false;
  }
  return true;
}

FbmSampler::FbmSampler(const FbmModel& model) : model_(model) {
  Eigen::MatrixXd cov = model.increment_covariance();
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    // numerical non-PD noise: retry with a tiny ridge
    cov.diagonal().array() += 1e-12;
    llt.compute(cov);
    ridge_applied_ = true;
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("covariance factorization failed even with ridge");
  }
  chol_ = llt.matrixL();
  sigma_ = model.sigma();
}

double FbmSampler::sample(RngStream& rng) const {
  const long long n = model_.steps;
  Eigen::VectorXd z(n);
  for (long long i = 0; i < n; ++i) z(i) = rng.normal();
  const Eigen::VectorXd x = chol_ * z;
  std::vector<double> h2(n);
  for (long long i = 0; i < n; ++i) h2[i] = x(i) * x(i) - 1.0;
  return pairwise_sum(h2) / sigma_;
}

void FbmSampler::sample_batch(RngStream& rng, std::span<double> out) const {
  const long long n = model_.steps;
  const std::size_t block = std::max<std::size_t>(1, (1 << 22) / static_cast<std::size_t>(n));
  std::vector<double> h2(n);
  std::size_t done = 0;
  Eigen::MatrixXd z(n, block);
  while (done < out.size()) {
    const std::size_t cols = std::min(block, out.size() - done);
    for (std::size_t c = 0; c < cols; ++c)
      for (long long i = 0; i < n; ++i) z(i, c) = rng.normal();
    const Eigen::MatrixXd x = chol_ * z.leftCols(cols);
    for (std::size_t c = 0; c < cols; ++c) {
      for (long long i = 0; i < n; ++i) h2[i] = x(i, c) * x(i, c) - 1.0;
      out[done + c] = pairwise_sum(h2) / sigma_;
    }
    done += cols;
  }
}

Eigen::VectorXd FbmSampler::sample_increments(RngStream& rng) const {
  Eigen::VectorXd z(model_.steps);
  for (long long i = 0; i < model_.steps; ++i) z(i) = rng.normal();
  return chol_ * z;
}

HermiteSumSampler::HermiteSumSampler(int q, long long n, bool use_chi_square_identity)
    : q_(q), n_(n), chi_square_(use_chi_square_identity && q == 2 && n >= 2) {
  if (q < 2) throw std::invalid_argument("need q >= 2");
  if (n < 1) throw std::invalid_argument("need n >= 1");
}

double HermiteSumSampler::sample(RngStream& rng) const {
  const double sqrt_n = std::sqrt(static_cast<double>(n_));
  if (chi_square_) {
    // sum_k H_2(Z_k) = chi^2_n - n exactly in law
    const double chi2 = 2.0 * gamma_draw(rng, static_cast<double>(n_) / 2.0);
    return (chi2 - static_cast<double>(n_)) / sqrt_n;
  }
  double acc = 0.0;
  for (long long k = 0; k < n_; ++k) acc += hermite(q_, rng.normal());
  return acc / sqrt_n;
}

double HermiteSumSampler::exact_tail(double z) const {
  if (!chi_square_)
    throw std::logic_error("exact tail available on the chi-square route only");
  const double n = static_cast<double>(n_);
  // P(F >= z) = P(chi^2_n >= n + z sqrt(n)) = Q(n/2, (n + z sqrt n)/2)
  const double threshold = n + z * std::sqrt(n);
  if (threshold <= 0.0) return 1.0;
  return boost::math::gamma_q(n / 2.0, threshold / 2.0);
}

namespace {

constexpr std::uint64_t kTailBlock = 1 << 16;

}  // namespace

TailEstimate estimate_tail(const Sampler& sampler, double z, std::uint64_t n_samples,
                           const RngSpec& rng, bool two_sided_event, int workers) {
  if (n_samples < 100) throw std::invalid_argument("need n_samples >= 100");
  if (!sampler) throw std::invalid_argument("sampler must be callable");

  const std::uint64_t blocks = (n_samples + kTailBlock - 1) / kTailBlock;
  std::vector<std::function<std::uint64_t()>> tasks;
  tasks.reserve(blocks);
  for (std::uint64_t b = 0; b < blocks; ++b) {
    const std::uint64_t count =
        std::min<std::uint64_t>(kTailBlock, n_samples - b * kTailBlock);
    tasks.push_back([&, b, count]() {
      RngStream stream(rng.seed, substream(rng.stream, b));
      std::uint64_t hits = 0;
      for (std::uint64_t i = 0; i < count; ++i) {
        const double f = sampler(stream);
        const double value = two_sided_event ? std::abs(f) : f;
        if (value >= z) ++hits;
      }
      return hits;
    });
  }
  const auto block_hits = run_batch(tasks, workers);

  TailEstimate est;
  est.z = z;
  est.samples = n_samples;
  est.two_sided_event = two_sided_event;
  est.rng = rng;
  for (auto h : block_hits) est.hits += h;
  est.p_hat = static_cast<double>(est.hits) / static_cast<double>(n_samples);
  using boost::math::binomial_distribution;
  const double n = static_cast<double>(n_samples);
  if (est.hits == 0) {
    est.censored = true;
    est.ci_low = 0.0;
    // one-sided 95% upper bound (rule of three regime)
    est.ci_high = binomial_distribution<double>::find_upper_bound_on_p(n, 0.0, 0.05);
  } else {
    est.ci_low = binomial_distribution<double>::find_lower_bound_on_p(
        n, static_cast<double>(est.hits), 0.025);
    est.ci_high = binomial_distribution<double>::find_upper_bound_on_p(
        n, static_cast<double>(est.hits), 0.025);
  }
  return est;
}

std::vector<MdpCell> mdp_curve(std::span<const MdpModel> family,
                               std::span<const double> a_grid,
                               std::span<const double> z_grid, int q,
                               const MdpCurveOptions& options) {
  if (q < 2) throw std::invalid_argument("need q >= 2");
  double qfact = 1.0;
  for (int i = 2; i <= q; ++i) qfact *= i;

  std::vector<MdpCell> cells;
  std::uint64_t cell_index = 0;
  for (const auto& model : family) {
    if (static_cast<bool>(model.sampler) == static_cast<bool>(model.exact_tail))
      throw std::invalid_argument("each model needs exactly one of sampler/exact_tail");
    for (const double a : a_grid) {
      if (!(a > 0.0)) throw std::invalid_argument("scales a must be positive");
      for (const double z : z_grid) {
        MdpCell cell;
        cell.n = model.n;
        cell.a = a;
        cell.z = z;
        cell.rate_target = -z * z / (2.0 * qfact);
        if (model.exact_tail) {
          cell.method = "exact";
          cell.p = model.exact_tail(a * z);
        } else {
          cell.method = "mc";
          RngSpec spec = options.rng;
          spec.stream = substream(options.rng.stream, 0x6D64 + cell_index);
          const TailEstimate est = estimate_tail(model.sampler, a * z, options.samples,
                                                 spec, false, options.workers);
          cell.samples = est.samples;
          cell.hits = est.hits;
          cell.p = est.p_hat;
        }
        if (cell.p > 0.0)
          cell.scaled_log = std::log(cell.p) / (a * a);
        else
          cell.censored = true;  // never log(0)
        cells.push_back(std::move(cell));
        ++cell_index;
      }
    }
  }
  return cells;
}

void check_distinct_streams(std::span<const std::uint64_t> streams) {
  std::set<std::uint64_t> seen;
  for (auto s : streams)
    if (!seen.insert(s).second)
      throw std::invalid_argument("stream collision: id " + std::to_string(s) +
                                  " used by more than one task");
}

}  // namespace wchaos
