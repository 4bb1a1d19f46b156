#pragma once

#include <stdexcept>

namespace wchaos {

// Configured work or size limit exceeded. CLI maps this to exit code 3.
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file or record. CLI maps this to exit code 4.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wchaos
