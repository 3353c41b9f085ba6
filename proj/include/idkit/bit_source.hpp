#pragma once
// Seeded fair-coin source. Bits are dealt one at a time from 64-bit words of a
// Mersenne Twister; the consumed count is exact.

#include <array>
#include <cstdint>
#include <random>

#include "idkit/errors.hpp"

namespace idkit {

class BitSource {
 public:
  explicit BitSource(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t consumed() const noexcept { return consumed_; }

  std::uint8_t next_bit() {
    if (available_ == 0) {
      word_ = engine_();
      available_ = 64;
    }
    --available_;
    ++consumed_;
    return static_cast<std::uint8_t>((word_ >> available_) & 1u);
  }

  /// n fair bits as an unsigned integer, first bit most significant (n <= 64).
  std::uint64_t next_bits(unsigned n) {
    std::uint64_t v = 0;
    for (unsigned k = 0; k < n; ++k) v = (v << 1) | next_bit();
    return v;
  }

  /// Uniform integer in [0, n) by rejection on ceil(log2 n) bits.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw DomainError("uniform_below(0)");
    if (n == 1) return 0;
    unsigned width = 0;
    while (width < 64 && (std::uint64_t{1} << width) < n) ++width;
    for (;;) {
      const std::uint64_t v = next_bits(width);
      if (v < n) return v;
    }
  }

  /// Bernoulli(p) by comparing a lazily revealed binary fraction with p.
  bool bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("bernoulli probability outside [0, 1]");
    // U < p decided at the first differing bit of U and p's binary expansion
    double rest = p;
    for (int k = 0; k < 1100; ++k) {
      rest *= 2.0;
      const std::uint8_t pbit = rest >= 1.0 ? 1 : 0;
      if (pbit) rest -= 1.0;
      const std::uint8_t ubit = next_bit();
      if (ubit != pbit) return ubit < pbit;
      if (rest == 0.0) return false;
    }
    return false;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t word_ = 0;
  unsigned available_ = 0;
  std::uint64_t consumed_ = 0;
};

/// Independent seed for shard or trial `index` of a run seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace idkit
