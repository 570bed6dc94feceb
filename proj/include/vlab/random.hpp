#pragma once

// Seeded generator with platform-independent draws. The standard
// distributions are implementation-defined, so draws are mapped by hand.

#include <cstdint>
#include <random>
#include <vector>

#include "vlab/core.hpp"

namespace vlab {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer in [0, n); modulo bias is below 2^-40 for desk-scale n.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

/// Values i.i.d. uniform in [-1,1] for both real and imaginary parts.
inline FiniteFunction random_function(const BaseSequence& base, Rng& rng, bool complex_values = true) {
  return FiniteFunction::from_ranks(base, [&](std::size_t) {
    const double re = rng.uniform(-1, 1);
    const double im = complex_values ? rng.uniform(-1, 1) : 0.0;
    return Complex(re, im);
  });
}

}  // namespace vlab
