#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace hetnet {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Purpose tags for independent random substreams.
enum class Stream : std::uint64_t {
  Geometry = 1,
  Channel = 2,
  Angles = 3,
  Synthetic = 4,
};

/// Seed of substream (tag, index) under a master seed.
inline std::uint64_t substream_seed(std::uint64_t master, Stream tag, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(master) ^ static_cast<std::uint64_t>(tag)) + index);
}

inline Rng make_rng(std::uint64_t master, Stream tag, std::uint64_t index) {
  return Rng(substream_seed(master, tag, index));
}

/// Circularly symmetric complex Gaussian with unit variance.
inline std::complex<double> complex_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::numbers::sqrt2 / 2.0);
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace hetnet
