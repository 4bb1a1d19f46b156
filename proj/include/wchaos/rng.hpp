#pragma once

// Counter-based random number generation. A stream is identified by
// (seed, stream); draws are a pure function of (seed, stream, counter), so
// identical specs reproduce identical values bit-exactly across runs and
// thread counts, and parallel work can split into sub-streams without
// coordination. Algorithm: splitmix64 counter sequence, Box-Muller normals.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wchaos {

struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string algorithm = "splitmix64/box-muller";
};

namespace detail {
inline std::uint64_t sm64_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Derives a child stream id; used to split work units off a base spec.
inline std::uint64_t substream(std::uint64_t stream, std::uint64_t index) {
  return detail::sm64_finalize(stream * 0x9E3779B97F4A7C15ULL + index + 1);
}

class RngStream {
 public:
  explicit RngStream(const RngSpec& spec) : RngStream(spec.seed, spec.stream) {
    spec_ = spec;
  }
  RngStream(std::uint64_t seed, std::uint64_t stream) {
    spec_.seed = seed;
    spec_.stream = stream;
    key_ = detail::sm64_finalize(detail::sm64_finalize(seed + 0x632BE59BD9B4E019ULL) ^
                                 detail::sm64_finalize(stream + 1));
  }

  const RngSpec& spec() const { return spec_; }

  std::uint64_t next_u64() {
    return detail::sm64_finalize(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform on the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  RngSpec spec_;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// Marsaglia-Tsang gamma variate, shape >= 1, unit scale.
inline double gamma_draw(RngStream& rng, double shape) {
  if (shape < 1.0) throw std::invalid_argument("gamma_draw requires shape >= 1");
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace wchaos
