#pragma once

#include <span>

namespace wchaos {

// Pairwise (binary-tree) summation with a fixed association order, so results
// are bit-identical regardless of how the inputs were produced in parallel.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace wchaos
