#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace sospopt {

/// splitmix64 step; the standard 64-bit finalizer used to derive
/// well-separated seeds from (seed, stream, index) tuples.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b));
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

/// Standard-normal vector that is a pure function of (seed, dim).
/// Each draw constructs a fresh engine, so results do not depend on how
/// samples are partitioned across threads or chunks.
inline Eigen::VectorXd normal_vector(std::uint64_t seed, Eigen::Index dim) {
  std::mt19937_64 eng(splitmix64(seed));
  std::normal_distribution<double> n01;
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = n01(eng);
  return v;
}

inline Eigen::MatrixXd normal_matrix(std::uint64_t seed, Eigen::Index rows,
                                     Eigen::Index cols) {
  std::mt19937_64 eng(splitmix64(seed));
  std::normal_distribution<double> n01;
  Eigen::MatrixXd m(rows, cols);
  // Column-major fill to match the flattening convention of ParamVector.
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n01(eng);
  return m;
}

inline double normal_scalar(std::uint64_t seed) {
  std::mt19937_64 eng(splitmix64(seed));
  std::normal_distribution<double> n01;
  return n01(eng);
}

}  // namespace sospopt
