#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace priorreg {

// Seeded random source with hand-rolled distributions. mt19937_64 produces
// the same stream on every conforming standard library, but the std::*
// distributions are implementation-defined, so uniform and normal draws are
// derived here from raw 64-bit words to keep artifacts byte-identical.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller; consumes two uniforms per pair, caches the second draw.
  double normal(double mean = 0.0, double sigma = 1.0);

  std::uint64_t integer_below(std::uint64_t n);

  // First k entries of a seeded Fisher-Yates shuffle of [0, n).
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace priorreg
