#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace metaqa {

using Rng = std::mt19937_64;

// Builds an engine from (seed, stream, substream). seed_seq expansion is
// fully specified by the standard, so the same triple yields the same state
// on every platform. Per-tree training streams come from here.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
      static_cast<std::uint32_t>(substream), static_cast<std::uint32_t>(substream >> 32)};
  return Rng(seq);
}

// Unbiased draw from [0, n). std::uniform_int_distribution is implementation
// defined, so all integer draws go through this instead.
inline std::uint64_t bounded(Rng& rng, std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// One standard normal via Box-Muller; the paired value is discarded so call
// sites stay stateless.
inline double normal01(Rng& rng) {
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Fisher-Yates on top of bounded() so shuffles are reproducible everywhere.
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace metaqa
