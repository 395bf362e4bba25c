#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "fips/grid.hpp"

namespace fips {

enum class FimKind { square, rectangular, terminal_row };

/// Spectral quadrature operator: maps nodal samples f(t_j) to cumulative
/// integrals int_0^{y_l} of the trigonometric interpolant of f.
///
/// kind = square:       y_l are the grid nodes themselves (M = N, row 0 = 0).
/// kind = rectangular:  y_l are caller-chosen points in (0, T], off the grid.
/// kind = terminal_row: the single row for y = T; every entry is exactly T/N,
///                      i.e. the trapezoidal/rectangle rule, which is what
///                      periodic spectral quadrature degenerates to over a
///                      full period.
struct IntegrationMatrix {
  FimKind kind = FimKind::square;
  EquispacedGrid grid;
  Eigen::VectorXd eval_points;  ///< upper limits y_l (square: the nodes)
  Eigen::MatrixXd entries;      ///< M x N
  double max_imag_residual = 0.0;  ///< largest |imag part| discarded in construction
};

namespace detail {

/// One matrix entry as a complex number: the integral over [0, y] of the
/// cardinal function F_j, via its mode expansion
///
///   entry = (1/N) * [ y + (T*i/(2*pi)) * sum_k (w_k/k) e^{-i w_k t_j} (1 - e^{i w_k y}) ]
///
/// summed over k = -N/2..N/2, k != 0, with half weight on the two extreme
/// modes k = +-N/2.  Splitting the Nyquist mode symmetrically reproduces the
/// real part of the single-sided sum k = -N/2..N/2-1 exactly while cancelling
/// its imaginary remainder -(T/(pi*N^2))*(-1)^j*(1 - cos(pi*N*y/T)) to
/// roundoff; the leftover magnitude is recorded as a construction health
/// metric.
inline std::complex<double> fim_entry(double y, int j, const EquispacedGrid& grid) {
  const int N = grid.N;
  const double T = grid.T;
  const double tj = grid.nodes[j];
  std::complex<double> sum{0.0, 0.0};
  for (int k = -N / 2; k <= N / 2; ++k) {
    if (k == 0) continue;
    const double weight = (std::abs(k) == N / 2) ? 0.5 : 1.0;
    const double omega = 2.0 * std::numbers::pi * static_cast<double>(k) / T;
    const std::complex<double> at_node{std::cos(omega * tj), -std::sin(omega * tj)};
    const std::complex<double> at_limit{std::cos(omega * y), std::sin(omega * y)};
    sum += (weight / static_cast<double>(k)) * at_node * (1.0 - at_limit);
  }
  const std::complex<double> bracket =
      std::complex<double>(y, 0.0) +
      std::complex<double>(0.0, T / (2.0 * std::numbers::pi)) * sum;
  return bracket / static_cast<double>(N);
}

}  // namespace detail

/// Square integration matrix: row l integrates the interpolant over [0, t_l].
/// Row 0 is identically zero (empty integration range).
inline IntegrationMatrix build_square_fim(const EquispacedGrid& grid) {
  IntegrationMatrix mat;
  mat.kind = FimKind::square;
  mat.grid = grid;
  mat.eval_points = grid.nodes;
  mat.entries.resize(grid.N, grid.N);
  double imag_max = 0.0;
  for (int l = 0; l < grid.N; ++l) {
    for (int j = 0; j < grid.N; ++j) {
      const std::complex<double> e = detail::fim_entry(grid.nodes[l], j, grid);
      mat.entries(l, j) = e.real();
      imag_max = std::max(imag_max, std::abs(e.imag()));
    }
  }
  mat.max_imag_residual = imag_max;
  return mat;
}

/// Rectangular integration matrix for arbitrary upper limits y_l in (0, T].
/// Limits that coincide with a grid node (within 1e-12*T) are rejected: the
/// square matrix already provides those rows exactly.
inline IntegrationMatrix build_rectangular_fim(const EquispacedGrid& grid,
                                               const Eigen::VectorXd& eval_points) {
  for (int l = 0; l < eval_points.size(); ++l) {
    const double y = eval_points[l];
    if (!(y > 0.0 && y <= grid.T)) {
      throw std::invalid_argument("build_rectangular_fim: eval point " + std::to_string(y) +
                                  " outside (0, T] with T = " + std::to_string(grid.T));
    }
    for (int j = 0; j < grid.N; ++j) {
      if (std::abs(y - grid.nodes[j]) < 1e-12 * grid.T) {
        throw std::invalid_argument(
            "build_rectangular_fim: eval point " + std::to_string(y) +
            " coincides with grid node " + std::to_string(j) +
            "; use the corresponding square FIM row instead");
      }
    }
  }
  IntegrationMatrix mat;
  mat.kind = FimKind::rectangular;
  mat.grid = grid;
  mat.eval_points = eval_points;
  mat.entries.resize(eval_points.size(), grid.N);
  double imag_max = 0.0;
  for (int l = 0; l < eval_points.size(); ++l) {
    for (int j = 0; j < grid.N; ++j) {
      const std::complex<double> e = detail::fim_entry(eval_points[l], j, grid);
      mat.entries(l, j) = e.real();
      imag_max = std::max(imag_max, std::abs(e.imag()));
    }
  }
  mat.max_imag_residual = imag_max;
  return mat;
}

/// The full-period quadrature row (upper limit y = T): entries are exactly
/// T/N, constructed directly rather than through the mode sum.
inline IntegrationMatrix terminal_quadrature(const EquispacedGrid& grid) {
  IntegrationMatrix mat;
  mat.kind = FimKind::terminal_row;
  mat.grid = grid;
  mat.eval_points = Eigen::VectorXd::Constant(1, grid.T);
  mat.entries = Eigen::MatrixXd::Constant(1, grid.N, grid.T / static_cast<double>(grid.N));
  mat.max_imag_residual = 0.0;
  return mat;
}

/// Apply the quadrature operator to nodal samples: cumulative integrals of
/// the sampled function's interpolant at the matrix's upper limits.
inline Eigen::VectorXd apply_quadrature(const IntegrationMatrix& matrix,
                                        const Eigen::VectorXd& samples) {
  if (samples.size() != matrix.grid.N) {
    throw std::invalid_argument("apply_quadrature: expected " + std::to_string(matrix.grid.N) +
                                " samples, got " + std::to_string(samples.size()));
  }
  return matrix.entries * samples;
}

}  // namespace fips
