#include "wchaos/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "wchaos/reduction.hpp"
#include "wchaos/rng.hpp"

namespace wchaos {

namespace {

double factorial_d(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

std::vector<MultigraphClass> multigraph_classes(int q, int m) {
  if (q < 1 || m < 1) throw std::invalid_argument("q and m must be positive");
  std::vector<MultigraphClass> out;
  if ((q * m) % 2 != 0 || m == 1) return out;

  // Fill the upper triangle of the multiplicity matrix row by row; the last
  // entry of each row is forced by the row-sum constraint.
  std::vector<std::vector<int>> mu(m, std::vector<int>(m, 0));
  std::vector<int> deg(m, 0);
  auto rec = [&](auto&& self, int u, int v) -> void {
    if (u == m - 1) {
      if (deg[m - 1] != q) return;
      DiagramMultigraph g;
      g.vertices = m;
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          if (mu[i][j] > 0) g.add_edge(i, j, mu[i][j]);
      if (!g.connected()) return;
      out.push_back({std::move(g), BigInt(0)});
      return;
    }
    if (v == m - 1) {
      const int need = q - deg[u];
      if (need < 0 || deg[v] + need > q) return;
      mu[u][v] = need;
      deg[u] += need;
      deg[v] += need;
      self(self, u + 1, u + 2);
      deg[u] -= need;
      deg[v] -= need;
      mu[u][v] = 0;
      return;
    }
    const int cap = std::min(q - deg[u], q - deg[v]);
    for (int c = 0; c <= cap; ++c) {
      mu[u][v] = c;
      deg[u] += c;
      deg[v] += c;
      self(self, u, v + 1);
      deg[u] -= c;
      deg[v] -= c;
      mu[u][v] = 0;
    }
  };
  if (m >= 2) rec(rec, 0, 1);
  for (auto& cls : out) cls.sigma_count = partitions_per_class(cls.graph, q);
  return out;
}

BigInt partitions_per_class(const DiagramMultigraph& g, int q) {
  // Choose which slots of each endpoint carry each edge bundle and a
  // bijection between them: prod_v q!/prod mu! * prod_edges mu!.
  BigInt count = 1;
  for (int v = 0; v < g.vertices; ++v) {
    count *= big_factorial(q);
    int used = 0;
    for (const auto& [e, mult] : g.edge_multiplicity) {
      if (e.first != v && e.second != v) continue;
      count /= big_factorial(mult);
      used += mult;
    }
    if (used != q) throw std::invalid_argument("graph is not q-regular");
  }
  for (const auto& [e, mult] : g.edge_multiplicity) count *= big_factorial(mult);
  return count;
}

namespace {

// Contracts the diagram network vertex by vertex. The frontier is a dense
// array over the currently open edges; each merge closes the edges shared
// with the next vertex and opens its remaining ones.
double contract_network(std::span<const double> hdense, int q, int dim,
                        const std::vector<std::vector<int>>& vertex_edges) {
  const int m = static_cast<int>(vertex_edges.size());
  const std::size_t frontier_cap = std::size_t{1} << 27;

  // Greedy order: always merge the vertex sharing the most open edges.
  std::vector<int> order;
  std::vector<char> used(m, 0);
  std::vector<char> open_flag;  // by edge id
  int total_edges = 0;
  for (const auto& ve : vertex_edges) total_edges = std::max(total_edges, ve.empty() ? 0 : *std::max_element(ve.begin(), ve.end()) + 1);
  open_flag.assign(total_edges, 0);
  for (int step = 0; step < m; ++step) {
    int best = -1, best_shared = -1;
    for (int v = 0; v < m; ++v) {
      if (used[v]) continue;
      int shared = 0;
      for (int e : vertex_edges[v]) shared += open_flag[e];
      if (shared > best_shared) {
        best_shared = shared;
        best = v;
      }
    }
    order.push_back(best);
    used[best] = 1;
    for (int e : vertex_edges[best]) open_flag[e] ^= 1;
  }

  std::vector<int> open;
  std::vector<double> frontier{1.0};
  std::vector<double> next;
  for (const int v : order) {
    const auto& ve = vertex_edges[v];
    std::vector<int> staying, fresh, closing;
    for (int e : open)
      if (std::find(ve.begin(), ve.end(), e) != ve.end())
        closing.push_back(e);
      else
        staying.push_back(e);
    for (int e : ve)
      if (std::find(open.begin(), open.end(), e) == open.end()) fresh.push_back(e);

    std::vector<int> new_open = staying;
    new_open.insert(new_open.end(), fresh.begin(), fresh.end());

    const int digits = static_cast<int>(staying.size() + fresh.size() + closing.size());
    std::size_t new_size = 1;
    for (std::size_t i = 0; i < new_open.size(); ++i) {
      if (new_size > frontier_cap / static_cast<std::size_t>(dim))
        throw CapExceeded("diagram contraction frontier too large; reduce N or m");
      new_size *= static_cast<std::size_t>(dim);
    }
    next.assign(new_size, 0.0);

    // Per-digit strides into the new frontier, the old frontier and hdense.
    std::vector<std::size_t> stride_new(digits, 0), stride_old(digits, 0),
        stride_h(digits, 0);
    const auto digit_of = [&](int e) -> int {
      auto it = std::find(staying.begin(), staying.end(), e);
      if (it != staying.end()) return static_cast<int>(it - staying.begin());
      it = std::find(fresh.begin(), fresh.end(), e);
      if (it != fresh.end())
        return static_cast<int>(staying.size() + (it - fresh.begin()));
      it = std::find(closing.begin(), closing.end(), e);
      return static_cast<int>(staying.size() + fresh.size() + (it - closing.begin()));
    };
    {
      std::size_t s = 1;
      for (std::size_t i = 0; i < new_open.size(); ++i, s *= dim)
        stride_new[digit_of(new_open[i])] = s;
      s = 1;
      for (std::size_t i = 0; i < open.size(); ++i, s *= dim)
        stride_old[digit_of(open[i])] = s;
      s = 1;
      for (int slot = q - 1; slot >= 0; --slot, s *= dim)
        stride_h[digit_of(ve[slot])] += s;
    }

    std::size_t count = 1;
    for (int i = 0; i < digits; ++i) {
      if (count > frontier_cap / static_cast<std::size_t>(dim))
        throw CapExceeded("diagram contraction loop too large; reduce N or m");
      count *= static_cast<std::size_t>(dim);
    }
    std::vector<int> val(digits, 0);
    std::size_t ni = 0, oi = 0, hi = 0;
    for (std::size_t it = 0;; ++it) {
      next[ni] += frontier[oi] * hdense[hi];
      if (it + 1 == count) break;
      for (int d = 0;; ++d) {
        if (val[d] + 1 < dim) {
          ++val[d];
          ni += stride_new[d];
          oi += stride_old[d];
          hi += stride_h[d];
          break;
        }
        ni -= static_cast<std::size_t>(val[d]) * stride_new[d];
        oi -= static_cast<std::size_t>(val[d]) * stride_old[d];
        hi -= static_cast<std::size_t>(val[d]) * stride_h[d];
        val[d] = 0;
      }
    }
    open = std::move(new_open);
    frontier = std::move(next);
    next = {};
  }
  return frontier[0];
}

std::vector<std::vector<int>> expand_vertex_edges(const DiagramMultigraph& g) {
  std::vector<std::vector<int>> vertex_edges(g.vertices);
  int id = 0;
  for (const auto& [e, mult] : g.edge_multiplicity)
    for (int k = 0; k < mult; ++k) {
      vertex_edges[e.first].push_back(id);
      vertex_edges[e.second].push_back(id);
      ++id;
    }
  return vertex_edges;
}

}  // namespace

double diagram_term(const SymmetricKernel& h, const DiagramMultigraph& g,
                    const CumulantOptions& options) {
  if (!g.regular(h.order()))
    throw std::invalid_argument("diagram graph must be q-regular for the kernel order");
  const auto dense = h.to_dense(options.dense_cap);
  return contract_network(dense, h.order(), h.dim(), expand_vertex_edges(g));
}

double exact_cumulant(const SymmetricKernel& h, int m, const CumulantOptions& options) {
  if (m < 1) throw std::invalid_argument("cumulant order m must be >= 1");
  if (m > options.max_order)
    throw CapExceeded("cumulant order exceeds work cap; reduce m or raise max_order");
  const int q = h.order();
  if (m == 1) return 0.0;
  if (m == 2) return factorial_d(q) * h.squared_norm();
  if ((q * m) % 2 != 0) return 0.0;

  const auto dense = h.to_dense(options.dense_cap);
  const auto classes = multigraph_classes(q, m);
  std::vector<double> contributions;
  contributions.reserve(classes.size());
  for (const auto& cls : classes)
    contributions.push_back(
        cls.sigma_count.convert_to<double>() *
        contract_network(dense, q, h.dim(), expand_vertex_edges(cls.graph)));
  return pairwise_sum(contributions);
}

double quadratic_form_cumulant(const Eigen::MatrixXd& a, int m) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix must be square");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("matrix must be symmetric");
  if (m < 1) throw std::invalid_argument("cumulant order m must be >= 1");
  if (m == 1) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed");
  double power_sum = 0.0;
  for (double lambda : solver.eigenvalues())
    power_sum += std::pow(lambda, m);
  return std::pow(2.0, m - 1) * factorial_d(m - 1) * power_sum;
}

Eigen::MatrixXd kernel_to_matrix(const SymmetricKernel& h) {
  if (h.order() != 2) throw std::invalid_argument("matrix view requires order 2");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(h.dim(), h.dim());
  for (const auto& [key, v] : h.entries()) {
    a(key[0], key[1]) = v;
    a(key[1], key[0]) = v;
  }
  return a;
}

SymmetricKernel matrix_to_kernel(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix must be square");
  SymmetricKernel h(2, static_cast<int>(a.rows()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i; j < a.cols(); ++j)
      h.set({static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j)},
            0.5 * (a(i, j) + a(j, i)));
  return h;
}

CumulantBound cumulant_bound(int q, int m, double K) {
  if (q < 2 || m < 3) throw std::invalid_argument("cumulant_bound needs q >= 2, m >= 3");
  if (!(K >= 0.0 && K <= 1.0)) throw std::invalid_argument("K must lie in [0,1]");
  CumulantBound b;
  b.log_value = q / 2.0 * std::lgamma(m + 1.0) +
                (m - 2) * 1.5 * q * std::log(static_cast<double>(q)) +
                alpha_value(q) * (m - 2) * std::log(K);
  b.value = std::exp(b.log_value);
  return b;
}

TermCheckSummary per_term_bound_check(
    const SymmetricKernel& h, int m,
    const std::function<bool(const PairPartition&, double term, double bound)>& visit,
    const CumulantOptions& options) {
  if (m < 3) throw std::invalid_argument("per_term_bound_check needs m >= 3");
  const int q = h.order();
  const double K = compute_K(h);

  TermCheckSummary summary;
  summary.bound = std::pow(K, matching_lower_bound(q, m));
  if ((q * m) % 2 != 0) return summary;

  const auto dense = h.to_dense(options.dense_cap);
  const auto groups = GroupedIndexSet::uniform(q, m);
  std::unordered_map<std::string, double> term_memo;
  std::string key;
  key.resize(static_cast<std::size_t>(m) * (m - 1) / 2);

  enumerate_partitions(
      groups,
      [&](const PairPartition& sigma) {
        // multiplicity-matrix key, assembled without building the multigraph
        std::fill(key.begin(), key.end(), 0);
        for (const auto& [a, b] : sigma.pairs) {
          int u = groups.group_of(a), v = groups.group_of(b);
          if (u > v) std::swap(u, v);
          // upper-triangle offset of (u,v)
          ++key[static_cast<std::size_t>(u) * (2 * m - u - 1) / 2 + (v - u - 1)];
        }
        auto it = term_memo.find(key);
        if (it == term_memo.end()) {
          const auto g = partition_to_multigraph(sigma, groups);
          it = term_memo.emplace(key, contract_network(dense, q, h.dim(),
                                                       expand_vertex_edges(g)))
                   .first;
        }
        const double term = it->second;
        ++summary.sigma_count;
        summary.max_abs_term = std::max(summary.max_abs_term, std::abs(term));
        if (std::abs(term) > summary.bound + 1e-12) ++summary.violations;
        return visit ? visit(sigma, term, summary.bound) : true;
      },
      options.enumeration);
  return summary;
}

double L_from_cum4(int q, double cum4, bool* clamped) {
  if (q < 2) throw std::invalid_argument("L_from_cum4 requires q >= 2");
  if (clamped) *clamped = false;
  if (cum4 < -1e-9)
    throw std::domain_error("cum4 is negative beyond estimation-noise tolerance");
  if (cum4 < 0.0) {
    if (clamped) *clamped = true;
    return 0.0;
  }
  return std::sqrt(cum4) / (q * factorial_d(q));
}

namespace {

struct KStats {
  double k[7] = {0, 0, 0, 0, 0, 0, 0};
};

// Central moments via a second pass over the (possibly resampled) values.
template <class Fetch>
KStats kstats_of(std::size_t n, int max_order, Fetch&& fetch) {
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += fetch(0, i);
  mean /= static_cast<double>(n);
  double m2 = 0, m3 = 0, m4 = 0, m5 = 0, m6 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = fetch(1, i) - mean;
    const double d2 = d * d;
    m2 += d2;
    if (max_order >= 3) m3 += d2 * d;
    if (max_order >= 4) m4 += d2 * d2;
    if (max_order >= 5) m5 += d2 * d2 * d;
    if (max_order >= 6) m6 += d2 * d2 * d2;
  }
  const double dn = static_cast<double>(n);
  m2 /= dn;
  m3 /= dn;
  m4 /= dn;
  m5 /= dn;
  m6 /= dn;

  KStats s;
  s.k[1] = mean;
  s.k[2] = dn / (dn - 1) * m2;
  if (max_order >= 3) s.k[3] = dn * dn / ((dn - 1) * (dn - 2)) * m3;
  if (max_order >= 4)
    s.k[4] = dn * dn * ((dn + 1) * m4 - 3 * (dn - 1) * m2 * m2) /
             ((dn - 1) * (dn - 2) * (dn - 3));
  if (max_order >= 5) s.k[5] = m5 - 10 * m3 * m2;
  if (max_order >= 6) s.k[6] = m6 - 15 * m4 * m2 - 10 * m3 * m3 + 30 * m2 * m2 * m2;
  return s;
}

}  // namespace

std::vector<CumulantEstimate> empirical_cumulants(std::span<const double> samples,
                                                  int max_order,
                                                  const EmpiricalOptions& options) {
  if (max_order < 1 || max_order > 6)
    throw std::invalid_argument("max_order must lie in 1..6");
  const std::size_t n = samples.size();
  if (n < static_cast<std::size_t>(10 * max_order))
    throw std::invalid_argument("need at least 10*max_order samples");

  const KStats point =
      kstats_of(n, max_order, [&](int, std::size_t i) { return samples[i]; });

  std::vector<KStats> replicates;
  replicates.reserve(options.bootstrap_rounds);
  for (int b = 0; b < options.bootstrap_rounds; ++b) {
    // counter-based streams let both passes replay the same resample indices
    const KStats rep = kstats_of(n, max_order, [&, streams = std::array<RngStream, 2>{
                                                      RngStream(options.seed, 2 * b),
                                                      RngStream(options.seed, 2 * b)}](
                                                   int pass, std::size_t) mutable {
      return samples[streams[pass].next_u64() % n];
    });
    replicates.push_back(rep);
  }

  std::vector<CumulantEstimate> out;
  for (int order = 1; order <= max_order; ++order) {
    CumulantEstimate est;
    est.order = order;
    est.value = point.k[order];
    est.biased = order >= 5;
    if (!replicates.empty() && replicates.size() > 1) {
      double mean = 0.0;
      for (const auto& r : replicates) mean += r.k[order];
      mean /= static_cast<double>(replicates.size());
      double var = 0.0;
      for (const auto& r : replicates) {
        const double d = r.k[order] - mean;
        var += d * d;
      }
      est.std_error = std::sqrt(var / (static_cast<double>(replicates.size()) - 1));
    }
    out.push_back(est);
  }
  return out;
}

}  // namespace wchaos
