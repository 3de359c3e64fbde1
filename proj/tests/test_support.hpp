#pragma once

// Hand-rolled generators for property-style tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "pcx/pcm.hpp"
#include "pcx/rng.hpp"

namespace pcx::test {

inline std::mt19937_64 rng(std::uint64_t seed) { return make_stream(seed, 0xbadc0ffeeULL); }

/// Entries log-uniform in [1/max_entry, max_entry].
inline PCMatrix random_matrix(std::mt19937_64& gen, std::size_t n, double max_entry) {
  const double span = std::log(max_entry);
  std::vector<double> up(n * (n - 1) / 2);
  for (double& v : up) v = std::exp(uniform(gen, -span, span));
  return PCMatrix(n, std::move(up));
}

/// Components log-uniform in [e^-span, e^span].
inline WeightVector random_weights(std::mt19937_64& gen, std::size_t n, double span = 2.0,
                                   Normalization norm = Normalization::kSumOne) {
  std::vector<double> w(n);
  for (double& v : w) v = std::exp(uniform(gen, -span, span));
  return WeightVector::normalized(std::move(w), norm);
}

inline std::vector<std::size_t> random_permutation(std::mt19937_64& gen, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[uniform_index(gen, i)]);
  return p;
}

inline double rel_diff(double x, double y) {
  return std::abs(x - y) / std::max({1e-300, std::abs(x), std::abs(y)});
}

inline double sup_diff(const WeightVector& x, const WeightVector& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

}  // namespace pcx::test
