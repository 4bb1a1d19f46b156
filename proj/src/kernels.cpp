#include "wchaos/kernels.hpp"

#include <cmath>

#include "wchaos/reduction.hpp"

namespace wchaos {

std::uint64_t tuple_multiplicity(const IndexTuple& canonical) {
  // q!/prod(c_j!) computed incrementally: multiply by position, divide by the
  // running count of the current repeated value. Stays integral throughout.
  std::uint64_t result = 1;
  std::uint64_t run = 0;
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    if (i > 0 && canonical[i] == canonical[i - 1])
      ++run;
    else
      run = 1;
    result = result * (i + 1) / run;
  }
  return result;
}

std::size_t flat_index(const IndexTuple& ordered, int dim) {
  std::size_t pos = 0;
  for (auto i : ordered) pos = pos * static_cast<std::size_t>(dim) + i;
  return pos;
}

double tensor_norm(const GeneralTensor& t) {
  std::vector<double> sq(t.data().size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = t.data()[i] * t.data()[i];
  return std::sqrt(pairwise_sum(sq));
}

double tensor_norm(const SymmetricKernel& h) { return std::sqrt(h.squared_norm()); }

SymmetricKernel normalize(const SymmetricKernel& h) {
  const double nrm = tensor_norm(h);
  if (nrm == 0.0) throw std::invalid_argument("cannot normalize the zero kernel");
  SymmetricKernel out(h.order(), h.dim());
  for (const auto& [key, v] : h.entries()) out.set(key, v / nrm);
  return out;
}

bool is_normalized(const SymmetricKernel& h, double tol) {
  return std::abs(h.squared_norm() - 1.0) <= tol;
}

double compute_K(const SymmetricKernel& h) {
  if (h.order() < 2) throw std::invalid_argument("compute_K requires order q >= 2");
  if (!is_normalized(h, 1e-9))
    throw std::invalid_argument("compute_K requires a normalized kernel");
  double best = 0.0;
  for (int r = 1; r < h.order(); ++r)
    best = std::max(best, contraction_norm_squared(h, h, r));
  return std::sqrt(best);
}

BigRational compute_K_squared(const RationalKernel& u) {
  if (u.order() < 2)
    throw std::invalid_argument("compute_K_squared requires order q >= 2");
  const BigRational nrm2 = u.squared_norm();
  if (nrm2 == 0) throw std::invalid_argument("zero kernel");
  BigRational best = 0;
  for (int r = 1; r < u.order(); ++r)
    best = std::max(best, contraction_norm_squared(u, u, r));
  return best / (nrm2 * nrm2);
}

}  // namespace wchaos
