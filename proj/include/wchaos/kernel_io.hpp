#pragma once

// Kernel exchange format, exact round trip required:
//
//   order 2 dim 3
//   1 1 0.5
//   1 2 -0.25
//
// Header first, then one line per canonical entry: q 1-based indices followed
// by the coefficient. Blank lines and '#' comments are ignored.

#include <iosfwd>
#include <string>

#include "wchaos/kernels.hpp"

namespace wchaos {

SymmetricKernel read_kernel(std::istream& in);
SymmetricKernel read_kernel_file(const std::string& path);

void write_kernel(std::ostream& out, const SymmetricKernel& h);
void write_kernel_file(const std::string& path, const SymmetricKernel& h);

}  // namespace wchaos
