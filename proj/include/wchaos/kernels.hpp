#pragma once

// Finite-dimensional symmetric tensors over an orthonormal basis, the
// discrete stand-in for chaos kernels h in the q-th symmetric tensor power.
//
// A kernel of order q over dimension N stores one coefficient per canonical
// (non-decreasing) index tuple; the value at any permuted tuple equals the
// canonical entry. Contractions identify r indices of two kernels and sum
// them out. The statistic K(h) = max_r |h (x)_r h| drives every deviation
// bound downstream, so it gets a dedicated streamed evaluation that never
// materializes the contracted tensor, plus an exact-rational variant.
//
// Kernels are value types, treated as immutable once built; every operation
// here takes const references and is safe to run concurrently on shared
// inputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wchaos/bigmath.hpp"
#include "wchaos/errors.hpp"

namespace wchaos {

// Basis indices are 0-based internally; the exchange file format is 1-based.
using IndexTuple = std::vector<std::uint16_t>;

inline constexpr int kMaxKernelOrder = 16;
inline constexpr std::size_t kDefaultDenseCap = std::size_t{1} << 20;

// Number of distinct permutations of a canonical tuple, q! / prod(c_j!).
std::uint64_t tuple_multiplicity(const IndexTuple& canonical);

// Row-major flat position of an ordered tuple in the dense [0,N)^q cube.
std::size_t flat_index(const IndexTuple& ordered, int dim);

template <class T>
class SymmetricKernelT {
 public:
  SymmetricKernelT(int order, int dim) : order_(order), dim_(dim) {
    if (order < 1 || order > kMaxKernelOrder)
      throw std::invalid_argument("kernel order must be in 1.." +
                                  std::to_string(kMaxKernelOrder));
    if (dim < 1 || dim > 65535)
      throw std::invalid_argument("kernel dim must be in 1..65535");
  }

  int order() const { return order_; }
  int dim() const { return dim_; }

  // Stores `value` at the canonical form of `idx` (any permutation accepted).
  // A zero value erases the entry so canonical storage has no explicit zeros.
  void set(IndexTuple idx, T value) {
    canonicalize(idx);
    if (value == T(0))
      coeffs_.erase(idx);
    else
      coeffs_[std::move(idx)] = std::move(value);
  }

  void add(IndexTuple idx, const T& value) {
    canonicalize(idx);
    auto it = coeffs_.find(idx);
    T next = (it == coeffs_.end()) ? value : T(it->second + value);
    if (next == T(0)) {
      if (it != coeffs_.end()) coeffs_.erase(it);
    } else if (it == coeffs_.end()) {
      coeffs_.emplace(std::move(idx), std::move(next));
    } else {
      it->second = std::move(next);
    }
  }

  // Full-tensor value at any ordered tuple; zero when absent.
  T at(IndexTuple idx) const {
    canonicalize(idx);
    auto it = coeffs_.find(idx);
    return it == coeffs_.end() ? T(0) : it->second;
  }

  const std::map<IndexTuple, T>& entries() const { return coeffs_; }

  // Squared norm over the full symmetric extension, via multiplicities.
  T squared_norm() const {
    T acc(0);
    for (const auto& [key, v] : coeffs_) acc += T(tuple_multiplicity(key)) * v * v;
    return acc;
  }

  // Dense expansion over all N^order ordered tuples (test oracle / sampler).
  std::vector<T> to_dense(std::size_t cap = kDefaultDenseCap) const {
    const std::size_t total = dense_size(cap);
    std::vector<T> dense(total, T(0));
    IndexTuple perm;
    for (const auto& [key, v] : coeffs_) {
      perm = key;
      do {
        dense[flat_index(perm, dim_)] = v;
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return dense;
  }

  // Recompression of a dense array: reads exactly the canonical positions,
  // so expand-then-recompress reproduces coefficients bit-exactly.
  static SymmetricKernelT from_dense(int order, int dim, std::span<const T> dense) {
    SymmetricKernelT k(order, dim);
    if (dense.size() != k.dense_size(dense.size()))
      throw std::invalid_argument("dense array size does not match N^order");
    IndexTuple idx(order, 0);
    while (true) {
      if (std::is_sorted(idx.begin(), idx.end())) {
        const T& v = dense[flat_index(idx, dim)];
        if (v != T(0)) k.coeffs_[idx] = v;
      }
      int pos = order - 1;
      while (pos >= 0 && idx[pos] == dim - 1) idx[pos--] = 0;
      if (pos < 0) break;
      ++idx[pos];
    }
    return k;
  }

  std::size_t dense_size(std::size_t cap) const {
    std::size_t total = 1;
    for (int i = 0; i < order_; ++i) {
      if (total > cap / static_cast<std::size_t>(dim_))
        throw CapExceeded("dense expansion N^q exceeds configured cap");
      total *= static_cast<std::size_t>(dim_);
    }
    return total;
  }

 private:
  void canonicalize(IndexTuple& idx) const {
    if (static_cast<int>(idx.size()) != order_)
      throw std::invalid_argument("index tuple length does not match order");
    for (auto i : idx)
      if (i >= dim_)
        throw std::invalid_argument("basis index out of range");
    std::sort(idx.begin(), idx.end());
  }

  int order_;
  int dim_;
  std::map<IndexTuple, T> coeffs_;
};

using SymmetricKernel = SymmetricKernelT<double>;
using RationalKernel = SymmetricKernelT<BigRational>;

// Order p+q-2r contraction result, materialized densely (no symmetry assumed).
template <class T>
class GeneralTensorT {
 public:
  GeneralTensorT(int order, int dim, std::vector<T> data)
      : order_(order), dim_(dim), data_(std::move(data)) {}

  int order() const { return order_; }
  int dim() const { return dim_; }
  const std::vector<T>& data() const { return data_; }

  T at(const IndexTuple& ordered) const {
    if (static_cast<int>(ordered.size()) != order_)
      throw std::invalid_argument("index tuple length does not match order");
    return data_[flat_index(ordered, dim_)];
  }

  // Order-0 contractions are scalars.
  T scalar() const {
    if (order_ != 0) throw std::logic_error("tensor is not order 0");
    return data_[0];
  }

  T squared_norm() const {
    T acc(0);
    for (const T& v : data_) acc += v * v;
    return acc;
  }

 private:
  int order_;
  int dim_;
  std::vector<T> data_;
};

using GeneralTensor = GeneralTensorT<double>;

namespace detail {

// Slice grouping for contraction: canonical r-multiset X of shared indices
// -> list of (remaining multiset A, kernel value at X u A).
template <class T>
using SliceMap = std::map<IndexTuple, std::vector<std::pair<IndexTuple, T>>>;

template <class T>
SliceMap<T> split_slices(const SymmetricKernelT<T>& f, int r) {
  SliceMap<T> slices;
  std::vector<std::pair<std::uint16_t, int>> runs;
  std::vector<int> take;
  for (const auto& [key, v] : f.entries()) {
    runs.clear();
    for (auto idx : key) {
      if (!runs.empty() && runs.back().first == idx)
        ++runs.back().second;
      else
        runs.emplace_back(idx, 1);
    }
    take.assign(runs.size(), 0);
    // enumerate sub-multisets of size r: choose take[i] in 0..runs[i].count
    const auto emit = [&]() {
      IndexTuple shared, rest;
      shared.reserve(r);
      rest.reserve(key.size() - r);
      for (std::size_t i = 0; i < runs.size(); ++i) {
        shared.insert(shared.end(), take[i], runs[i].first);
        rest.insert(rest.end(), runs[i].second - take[i], runs[i].first);
      }
      slices[std::move(shared)].emplace_back(std::move(rest), v);
    };
    const int nruns = static_cast<int>(runs.size());
    auto rec = [&](auto&& self, int pos, int left) -> void {
      if (pos == nruns) {
        if (left == 0) emit();
        return;
      }
      for (int c = 0; c <= std::min(left, runs[pos].second); ++c) {
        take[pos] = c;
        self(self, pos + 1, left - c);
      }
      take[pos] = 0;
    };
    rec(rec, 0, r);
  }
  return slices;
}

// Accumulated contraction values keyed by the canonical pair (A, B) of
// free-index multisets. Each ordered result entry equals the keyed value.
template <class T>
std::map<std::pair<IndexTuple, IndexTuple>, T> contract_blocks(
    const SymmetricKernelT<T>& f, const SymmetricKernelT<T>& g, int r) {
  if (f.dim() != g.dim())
    throw std::invalid_argument("contraction requires equal dimensions");
  if (r < 1 || r > std::min(f.order(), g.order()))
    throw std::invalid_argument("contraction order r out of range");
  auto fs = split_slices(f, r);
  auto gs = split_slices(g, r);
  std::map<std::pair<IndexTuple, IndexTuple>, T> out;
  auto fi = fs.begin();
  auto gi = gs.begin();
  while (fi != fs.end() && gi != gs.end()) {
    if (fi->first < gi->first) {
      ++fi;
    } else if (gi->first < fi->first) {
      ++gi;
    } else {
      const T perms = T(tuple_multiplicity(fi->first));
      for (const auto& [a, va] : fi->second)
        for (const auto& [b, vb] : gi->second) out[{a, b}] += perms * va * vb;
      ++fi;
      ++gi;
    }
  }
  return out;
}

}  // namespace detail

// f (x)_r g. Entry at (a_1..a_{p-r}, b_1..b_{q-r}) is the sum over the r
// identified indices of f(x,a) g(x,b); for r = p = q this is the scalar
// <f, g>. Throws CapExceeded when N^(p+q-2r) exceeds dense_cap.
template <class T>
GeneralTensorT<T> contract(const SymmetricKernelT<T>& f, const SymmetricKernelT<T>& g,
                           int r, std::size_t dense_cap = kDefaultDenseCap) {
  auto blocks = detail::contract_blocks(f, g, r);
  const int out_order = f.order() + g.order() - 2 * r;
  const int dim = f.dim();
  std::size_t total = 1;
  for (int i = 0; i < out_order; ++i) {
    if (total > dense_cap / static_cast<std::size_t>(dim))
      throw CapExceeded("contraction result N^(p+q-2r) exceeds dense cap; "
                        "use contraction_norm_squared for norms");
    total *= static_cast<std::size_t>(dim);
  }
  std::vector<T> dense(total, T(0));
  const std::size_t b_span = [&] {
    std::size_t s = 1;
    for (int i = 0; i < g.order() - r; ++i) s *= static_cast<std::size_t>(dim);
    return s;
  }();
  for (const auto& [key, v] : blocks) {
    IndexTuple a = key.first;
    do {
      const std::size_t abase = (a.empty() ? 0 : flat_index(a, dim)) * b_span;
      IndexTuple b = key.second;
      do {
        dense[abase + (b.empty() ? 0 : flat_index(b, dim))] = v;
      } while (std::next_permutation(b.begin(), b.end()));
    } while (std::next_permutation(a.begin(), a.end()));
  }
  return GeneralTensorT<T>(out_order, dim, std::move(dense));
}

// |f (x)_r g|^2 via streamed accumulation over canonical block pairs; never
// materializes the N^(p+q-2r) tensor.
template <class T>
T contraction_norm_squared(const SymmetricKernelT<T>& f, const SymmetricKernelT<T>& g,
                           int r) {
  auto blocks = detail::contract_blocks(f, g, r);
  T acc(0);
  for (const auto& [key, v] : blocks)
    acc += T(tuple_multiplicity(key.first)) * T(tuple_multiplicity(key.second)) * v * v;
  return acc;
}

// Euclidean norm of the full coefficient array.
double tensor_norm(const GeneralTensor& t);
double tensor_norm(const SymmetricKernel& h);

// Returns h scaled to unit norm (within 1e-12); throws on the zero kernel.
SymmetricKernel normalize(const SymmetricKernel& h);

bool is_normalized(const SymmetricKernel& h, double tol = 1e-12);

// K(h) = max_{r=1..q-1} |h (x)_r h| for normalized h; lies in [0, 1].
double compute_K(const SymmetricKernel& h);

// Exact-rational, scale-invariant form K^2 = max_r |u (x)_r u|^2 / |u|^4;
// does not require (or allow) normalization, which is irrational in general.
BigRational compute_K_squared(const RationalKernel& u);

}  // namespace wchaos
