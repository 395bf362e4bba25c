#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace fips {

/// Equispaced nodes t_j = T*j/N, j = 0..N-1, covering one period [0, T).
///
/// N must be even (the trigonometric machinery pairs modes +-k up to the
/// Nyquist frequency N/2) and at least 2.  Node 0 is exactly 0 and the last
/// node lies strictly below T; the point t = T is identified with t = 0.
struct EquispacedGrid {
  int N = 0;
  double T = 0.0;
  Eigen::VectorXd nodes;
};

inline EquispacedGrid make_grid(int N, double T) {
  if (N < 2) {
    throw std::invalid_argument("make_grid: node count must be at least 2, got " +
                                std::to_string(N));
  }
  if (N % 2 != 0) {
    throw std::invalid_argument("make_grid: node count must be even, got " + std::to_string(N));
  }
  if (!(T > 0.0)) {
    throw std::invalid_argument("make_grid: period must be positive, got " + std::to_string(T));
  }
  EquispacedGrid grid;
  grid.N = N;
  grid.T = T;
  grid.nodes.resize(N);
  for (int j = 0; j < N; ++j) {
    grid.nodes[j] = T * static_cast<double>(j) / static_cast<double>(N);
  }
  return grid;
}

/// Reduce t into the fundamental period [0, T).
inline double reduce_mod_period(double t, double T) {
  double r = std::fmod(t, T);
  if (r < 0.0) r += T;
  if (r >= T) r = 0.0;  // r == T can occur when a tiny negative t rounds up
  return r;
}

}  // namespace fips
