#pragma once

// Test-only oracles, kept independent of the library implementation paths
// they check:
//  - brute-force pairing enumeration with constraint filtering
//  - exhaustive edge-subset maximum matching
//  - full dense-expansion tensor norms
//  - the qm/2-deep loop-nest evaluation of diagram terms
//  - random kernel generators with fixed seeds

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "wchaos/diagrams.hpp"
#include "wchaos/kernels.hpp"
#include "wchaos/rng.hpp"

namespace wchaos::testing {

// Every perfect pairing of {0..2k-1}, no constraints.
inline void all_pairings(std::vector<int> elems,
                         const std::function<void(const std::vector<std::pair<int, int>>&)>& emit,
                         std::vector<std::pair<int, int>>& acc) {
  if (elems.empty()) {
    emit(acc);
    return;
  }
  const int a = elems.front();
  for (std::size_t i = 1; i < elems.size(); ++i) {
    const int b = elems[i];
    std::vector<int> rest;
    for (std::size_t j = 1; j < elems.size(); ++j)
      if (j != i) rest.push_back(elems[j]);
    acc.emplace_back(a, b);
    all_pairings(std::move(rest), emit, acc);
    acc.pop_back();
  }
}

// |Pi(...)| by unpruned brute force: enumerate all pairings, filter the
// within-group and connectivity constraints afterwards.
inline std::uint64_t brute_force_partition_count(const GroupedIndexSet& groups) {
  const int total = groups.total();
  if (total % 2 != 0) return 0;
  std::vector<int> elems(total);
  for (int i = 0; i < total; ++i) elems[i] = i;
  std::uint64_t count = 0;
  std::vector<std::pair<int, int>> acc;
  all_pairings(
      elems,
      [&](const std::vector<std::pair<int, int>>& pairs) {
        PairPartition p;
        p.pairs = pairs;
        std::sort(p.pairs.begin(), p.pairs.end());
        if (is_valid_partition(p, groups)) ++count;
      },
      acc);
  return count;
}

// Maximum matching by exhaustive search over subsets of the deduplicated
// edge list.
inline int exhaustive_matching(const DiagramMultigraph& g) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& [e, mult] : g.edge_multiplicity) edges.push_back(e);
  const int ne = static_cast<int>(edges.size());
  int best = 0;
  for (std::uint32_t mask = 0; mask < (1u << ne); ++mask) {
    std::uint32_t used_vertices = 0;
    bool ok = true;
    int size = 0;
    for (int i = 0; i < ne && ok; ++i) {
      if (!(mask >> i & 1u)) continue;
      const std::uint32_t verts = (1u << edges[i].first) | (1u << edges[i].second);
      if (used_vertices & verts) ok = false;
      used_vertices |= verts;
      ++size;
    }
    if (ok) best = std::max(best, size);
  }
  return best;
}

// Full-expansion norm: sum coefficient^2 over all N^q ordered positions.
inline double dense_norm_oracle(const SymmetricKernel& h) {
  double acc = 0.0;
  for (double v : h.to_dense()) acc += v * v;
  return std::sqrt(acc);
}

// Diagram term by the direct loop nest: one summation variable per block of
// sigma, product of m kernel lookups. Only sane for N <= 4.
inline double diagram_term_brute(const SymmetricKernel& h, const PairPartition& sigma,
                                 const GroupedIndexSet& groups) {
  const int q = h.order();
  const int n_blocks = static_cast<int>(sigma.pairs.size());
  std::vector<int> block_of(groups.total(), -1);
  for (int b = 0; b < n_blocks; ++b) {
    block_of[sigma.pairs[b].first] = b;
    block_of[sigma.pairs[b].second] = b;
  }
  std::vector<int> assign(n_blocks, 0);
  const int dim = h.dim();
  double total = 0.0;
  for (;;) {
    double prod = 1.0;
    for (int g = 0; g < groups.groups() && prod != 0.0; ++g) {
      IndexTuple idx(q);
      for (int s = 0; s < q; ++s)
        idx[s] = static_cast<std::uint16_t>(assign[block_of[g * q + s]]);
      prod *= h.at(std::move(idx));
    }
    total += prod;
    int pos = n_blocks - 1;
    while (pos >= 0 && assign[pos] == dim - 1) assign[pos--] = 0;
    if (pos < 0) break;
    ++assign[pos];
  }
  return total;
}

// cum_m by enumerating sigma and summing brute-force terms.
inline double exact_cumulant_brute(const SymmetricKernel& h, int m) {
  const auto groups = GroupedIndexSet::uniform(h.order(), m);
  double total = 0.0;
  enumerate_partitions(groups, [&](const PairPartition& sigma) {
    total += diagram_term_brute(h, sigma, groups);
    return true;
  });
  return total;
}

// Random symmetric kernel with entries in [-1, 1]; roughly half the
// canonical positions are filled.
inline SymmetricKernel random_kernel(int q, int dim, RngStream& rng,
                                     bool normalized = true) {
  SymmetricKernel h(q, dim);
  IndexTuple idx(q, 0);
  for (;;) {
    if (std::is_sorted(idx.begin(), idx.end()) && rng.uniform01() < 0.6)
      h.set(idx, 2.0 * rng.uniform01() - 1.0);
    int pos = q - 1;
    while (pos >= 0 && idx[pos] == dim - 1) idx[pos--] = 0;
    if (pos < 0) break;
    ++idx[pos];
  }
  if (h.entries().empty())
    h.set(IndexTuple(static_cast<std::size_t>(q), 0), 1.0);
  return normalized ? normalize(h) : h;
}

}  // namespace wchaos::testing
