#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace wchaos {

// Exact integer/rational arithmetic for partition counts and the
// count-sandwich bounds, which overflow 64 bits quickly.
using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline BigInt big_factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline BigInt big_pow(BigInt base, int exp) {
  BigInt r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace wchaos
