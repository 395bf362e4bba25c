#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "fips/grid.hpp"

namespace fips {

/// Discrete Fourier coefficients of N real samples, one per mode
/// k = -N/2 .. N/2-1 (the asymmetric mode set natural to an even-N DFT).
struct FourierCoefficients {
  EquispacedGrid grid;
  Eigen::VectorXcd coeffs;  ///< coeffs[k + N/2] stores the mode-k coefficient

  std::complex<double> coeff(int k) const { return coeffs[k + grid.N / 2]; }
};

/// Forward transform: c_k = (1/N) * sum_j f_j * exp(-2*pi*i*j*k/N).
///
/// Direct O(N^2) summation.  N stays in the low hundreds here, and the direct
/// sum is bit-reproducible across platforms, unlike most FFT backends.
inline FourierCoefficients dft_coefficients(const Eigen::VectorXd& samples,
                                            const EquispacedGrid& grid) {
  if (samples.size() != grid.N) {
    throw std::invalid_argument("dft_coefficients: expected " + std::to_string(grid.N) +
                                " samples, got " + std::to_string(samples.size()));
  }
  const int N = grid.N;
  FourierCoefficients out{grid, Eigen::VectorXcd::Zero(N)};
  for (int k = -N / 2; k < N / 2; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (int j = 0; j < N; ++j) {
      const double phase =
          -2.0 * std::numbers::pi * static_cast<double>(j) * static_cast<double>(k) /
          static_cast<double>(N);
      acc += samples[j] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    out.coeffs[k + N / 2] = acc / static_cast<double>(N);
  }
  return out;
}

/// Inverse transform evaluated at the nodes: f_j = sum_k c_k * exp(+2*pi*i*j*k/N).
///
/// For coefficients of real samples the imaginary parts cancel to roundoff;
/// the real part is returned.
inline Eigen::VectorXd inverse_dft(const FourierCoefficients& fc) {
  const int N = fc.grid.N;
  Eigen::VectorXd out(N);
  for (int j = 0; j < N; ++j) {
    std::complex<double> acc{0.0, 0.0};
    for (int k = -N / 2; k < N / 2; ++k) {
      const double phase =
          2.0 * std::numbers::pi * static_cast<double>(j) * static_cast<double>(k) /
          static_cast<double>(N);
      acc += fc.coeffs[k + N / 2] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    out[j] = acc.real();
  }
  return out;
}

/// Cardinal (Lagrange) basis function of the equispaced trigonometric
/// interpolant:
///
///   F_j(t) = (1/N) * sin(N*pi*(t - t_j)/T) * cot(pi*(t - t_j)/T),
///
/// with F_j(t_l) = delta_{jl}.  The removable singularity at t == t_j (mod T)
/// is detected via |sin(pi*(t - t_j)/T)| < 1e-12 and replaced by the limit
/// value 1, which sidesteps the catastrophic cancellation in cot.
inline double lagrange_basis(int j, double t, const EquispacedGrid& grid) {
  if (j < 0 || j >= grid.N) {
    throw std::out_of_range("lagrange_basis: node index " + std::to_string(j) +
                            " outside [0, " + std::to_string(grid.N) + ")");
  }
  const double d = reduce_mod_period(t - grid.nodes[j], grid.T);
  const double a = std::numbers::pi * d / grid.T;  // in [0, pi)
  const double sa = std::sin(a);
  if (std::abs(sa) < 1e-12) return 1.0;
  return std::sin(static_cast<double>(grid.N) * a) * (std::cos(a) / sa) /
         static_cast<double>(grid.N);
}

/// T-periodic trigonometric interpolant through nodal samples.
struct TrigInterpolant {
  EquispacedGrid grid;
  Eigen::VectorXd values;
};

/// Evaluate sum_j values[j] * F_j(t).  Exact (to roundoff) for trigonometric
/// monomials with |k| <= N/2 - 1 and for the Nyquist cosine cos(pi*N*t/T).
inline double eval_interpolant(const TrigInterpolant& interp, double t) {
  if (interp.values.size() != interp.grid.N) {
    throw std::invalid_argument("eval_interpolant: sample count does not match grid");
  }
  double acc = 0.0;
  for (int j = 0; j < interp.grid.N; ++j) {
    acc += interp.values[j] * lagrange_basis(j, t, interp.grid);
  }
  return acc;
}

/// Column-wise interpolation of an N x d matrix of nodal values; returns the
/// d interpolants evaluated at t.  Used to recover continuous state/control
/// trajectories from nodal solutions.
inline Eigen::VectorXd eval_vector_interpolant(const Eigen::MatrixXd& values_matrix,
                                               const EquispacedGrid& grid, double t) {
  if (values_matrix.rows() != grid.N) {
    throw std::invalid_argument("eval_vector_interpolant: expected " + std::to_string(grid.N) +
                                " rows, got " + std::to_string(values_matrix.rows()));
  }
  Eigen::VectorXd weights(grid.N);
  for (int j = 0; j < grid.N; ++j) weights[j] = lagrange_basis(j, t, grid);
  return values_matrix.transpose() * weights;
}

}  // namespace fips
