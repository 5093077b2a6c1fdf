#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "corpca/linalg.hpp"

namespace corpca {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent stream seed for a tuple of indices under a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(master);
  for (auto p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

inline Matrix randn(Eigen::Index rows, Eigen::Index cols, Rng& rng, double stddev = 1.0) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix out(rows, cols);
  // Column-major fill so the stream order is independent of Eigen internals.
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) out(r, c) = dist(rng);
  return out;
}

inline Vector randn(Eigen::Index n, Rng& rng, double stddev = 1.0) {
  std::normal_distribution<double> dist(0.0, stddev);
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = dist(rng);
  return out;
}

}  // namespace corpca
