#pragma once

#include <cstdint>
#include <random>

namespace pcx {

/// Independent, reproducible stream for (seed, index). Used so that start
/// points and Monte-Carlo trials do not depend on execution order.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32), 0x70637875u};
  return std::mt19937_64(seq);
}

/// Uniform on [lo, hi) from the top 53 bits. Bit-identical across standard
/// libraries, unlike std::uniform_real_distribution.
inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

/// Uniform integer in [0, n).
inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t n) {
  return static_cast<std::uint64_t>(uniform(gen, 0.0, static_cast<double>(n)));
}

}  // namespace pcx
