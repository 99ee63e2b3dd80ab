#pragma once

#include <array>
#include <cstdint>

namespace equiloc {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
// pure function of (key, counter), so each (scenario, node, pair, purpose)
// tuple owns an independent substream and adding scenarios never shifts
// earlier draws.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(Key key) : key_(key) {}
  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter counter) const;

  // Two independent doubles in [0, 1) with 53 random bits each.
  std::array<double, 2> uniforms(Counter counter) const;

  // One standard normal variate (Box-Muller on the counter's block).
  double normal(Counter counter) const;

 private:
  Key key_;
};

// Derives a generator key from a user seed and a stream discriminator.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace equiloc
