#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fips/fourier.hpp"
#include "fips/grid.hpp"

using namespace fips;
namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("equispaced grid nodes are T*j/N") {
  const EquispacedGrid g = make_grid(4, 2.0 * kPi);
  REQUIRE(g.N == 4);
  REQUIRE(g.nodes.size() == 4);
  CHECK(g.nodes[0] == 0.0);
  CHECK(g.nodes[1] == doctest::Approx(kPi / 2.0).epsilon(1e-15));
  CHECK(g.nodes[2] == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(g.nodes[3] == doctest::Approx(3.0 * kPi / 2.0).epsilon(1e-15));

  const EquispacedGrid g2 = make_grid(2, 1.0);
  CHECK(g2.nodes[0] == 0.0);
  CHECK(g2.nodes[1] == 0.5);
}

TEST_CASE("grid nodes are strictly increasing and stay inside [0, T)") {
  for (int N : {2, 6, 50, 128}) {
    for (double T : {0.25, 1.0, 24.0}) {
      const EquispacedGrid g = make_grid(N, T);
      CHECK(g.nodes[0] == 0.0);
      for (int j = 1; j < N; ++j) CHECK(g.nodes[j] > g.nodes[j - 1]);
      CHECK(g.nodes[N - 1] < T);
    }
  }
}

TEST_CASE("grid construction rejects bad arguments") {
  CHECK_THROWS_AS(make_grid(3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(-2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, -1.0), std::invalid_argument);
}

TEST_CASE("reduce_mod_period maps into [0, T)") {
  const double T = 2.0;
  CHECK(reduce_mod_period(0.0, T) == 0.0);
  CHECK(reduce_mod_period(1.5, T) == 1.5);
  CHECK(reduce_mod_period(2.0, T) == 0.0);
  CHECK(reduce_mod_period(-0.5, T) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(reduce_mod_period(7.25, T) == doctest::Approx(1.25).epsilon(1e-14));
  for (double t : {-13.7, -2.0, 1e-17, 3.999999, 123.456}) {
    const double r = reduce_mod_period(t, T);
    CHECK(r >= 0.0);
    CHECK(r < T);
  }
}

TEST_CASE("DFT of a constant puts everything in the DC coefficient") {
  const EquispacedGrid g = make_grid(8, 2.0 * kPi);
  const Eigen::VectorXd samples = Eigen::VectorXd::Constant(8, 3.25);
  const FourierCoefficients fc = dft_coefficients(samples, g);
  REQUIRE(fc.coeffs.size() == 8);
  CHECK(std::abs(fc.coeff(0) - std::complex<double>(3.25, 0.0)) <= 1e-14);
  for (int k = -4; k < 4; ++k) {
    if (k == 0) continue;
    CHECK(std::abs(fc.coeff(k)) <= 1e-14);
  }
}

TEST_CASE("DFT of cos picks out the +/-1 pair") {
  const int N = 8;
  const double T = 2.0 * kPi;
  const EquispacedGrid g = make_grid(N, T);
  Eigen::VectorXd samples(N);
  for (int j = 0; j < N; ++j) samples[j] = std::cos(2.0 * kPi * g.nodes[j] / T);
  const FourierCoefficients fc = dft_coefficients(samples, g);
  CHECK(std::abs(fc.coeff(1) - std::complex<double>(0.5, 0.0)) <= 1e-13);
  CHECK(std::abs(fc.coeff(-1) - std::complex<double>(0.5, 0.0)) <= 1e-13);
  for (int k = -N / 2; k < N / 2; ++k) {
    if (k == 1 || k == -1) continue;
    CHECK(std::abs(fc.coeff(k)) <= 1e-13);
  }
}

TEST_CASE("the Nyquist sine is invisible on the grid") {
  // sin(omega_{N/2} t) vanishes at every node, so its samples are zero and so
  // is every coefficient.
  const int N = 8;
  const double T = 2.0 * kPi;
  const EquispacedGrid g = make_grid(N, T);
  const double omega = 2.0 * kPi * (N / 2) / T;
  Eigen::VectorXd samples(N);
  for (int j = 0; j < N; ++j) samples[j] = std::sin(omega * g.nodes[j]);
  CHECK(samples.cwiseAbs().maxCoeff() <= 5e-15);

  const FourierCoefficients fc = dft_coefficients(Eigen::VectorXd::Zero(N), g);
  for (int k = -N / 2; k < N / 2; ++k) CHECK(std::abs(fc.coeff(k)) == 0.0);
}

TEST_CASE("DFT round trip reproduces the samples") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int N : {2, 8, 64, 256}) {
    const EquispacedGrid g = make_grid(N, 1.5);
    Eigen::VectorXd samples(N);
    for (int j = 0; j < N; ++j) samples[j] = dist(rng);
    const Eigen::VectorXd back = inverse_dft(dft_coefficients(samples, g));
    CHECK((back - samples).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("coefficients of real samples are conjugate symmetric") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const int N = 16;
  const EquispacedGrid g = make_grid(N, 3.0);
  Eigen::VectorXd samples(N);
  for (int j = 0; j < N; ++j) samples[j] = dist(rng);
  const FourierCoefficients fc = dft_coefficients(samples, g);
  for (int k = 1; k < N / 2; ++k) {
    CHECK(std::abs(fc.coeff(k) - std::conj(fc.coeff(-k))) <= 1e-12);
  }
  CHECK(std::abs(std::imag(fc.coeff(0))) <= 1e-13);
}

TEST_CASE("trigonometric cardinal functions satisfy the delta property") {
  for (int N : {2, 4, 8, 16}) {
    const EquispacedGrid g = make_grid(N, 2.0 * kPi);
    for (int j = 0; j < N; ++j) {
      for (int l = 0; l < N; ++l) {
        const double expected = (j == l) ? 1.0 : 0.0;
        CHECK(std::abs(lagrange_basis(j, g.nodes[l], g) - expected) <= 1e-14);
      }
    }
  }
}

TEST_CASE("cardinal function hand value at N=2") {
  const EquispacedGrid g = make_grid(2, 2.0 * kPi);
  CHECK(lagrange_basis(0, kPi / 2.0, g) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("cardinal functions are T-periodic") {
  const EquispacedGrid g = make_grid(6, 1.7);
  for (double t : {0.05, 0.3, 0.77, 1.2, 1.69}) {
    for (int j = 0; j < 6; ++j) {
      CHECK(std::abs(lagrange_basis(j, t + 1.7, g) - lagrange_basis(j, t, g)) <= 1e-12);
      CHECK(std::abs(lagrange_basis(j, t - 2.0 * 1.7, g) - lagrange_basis(j, t, g)) <= 1e-12);
    }
  }
}

TEST_CASE("cardinal functions form a partition of unity") {
  const int N = 12;
  const EquispacedGrid g = make_grid(N, 5.0);
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> dist(0.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double t = dist(rng);
    double sum = 0.0;
    for (int j = 0; j < N; ++j) sum += lagrange_basis(j, t, g);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("cardinal index is range checked") {
  const EquispacedGrid g = make_grid(4, 1.0);
  CHECK_THROWS_AS(lagrange_basis(-1, 0.3, g), std::out_of_range);
  CHECK_THROWS_AS(lagrange_basis(4, 0.3, g), std::out_of_range);
}

TEST_CASE("interpolant reproduces nodal values and resolved modes") {
  const int N = 8;
  const double T = 2.0;
  const EquispacedGrid g = make_grid(N, T);
  Eigen::VectorXd samples(N);
  for (int j = 0; j < N; ++j) samples[j] = std::cos(2.0 * kPi * g.nodes[j] / T);
  const TrigInterpolant interp{g, samples};

  for (int j = 0; j < N; ++j) {
    CHECK(std::abs(eval_interpolant(interp, g.nodes[j]) - samples[j]) <= 1e-13);
  }
  // Off-node evaluation of a resolved mode is exact to roundoff.
  CHECK(std::abs(eval_interpolant(interp, T / 16.0) - std::cos(kPi / 8.0)) <= 1e-12);
  // Periodic extension.
  for (double t : {0.123, 0.9, 1.456}) {
    CHECK(std::abs(eval_interpolant(interp, t + T) - eval_interpolant(interp, t)) <= 1e-12);
  }
}

TEST_CASE("interpolation is exact for every resolved trigonometric mode") {
  std::mt19937_64 rng(99);
  for (int N : {4, 8, 16}) {
    const double T = 3.0;
    const EquispacedGrid g = make_grid(N, T);
    std::uniform_real_distribution<double> dist(0.0, T);
    for (int k = 0; k <= N / 2; ++k) {
      const double omega = 2.0 * kPi * k / T;
      Eigen::VectorXd cs(N), ss(N);
      for (int j = 0; j < N; ++j) {
        cs[j] = std::cos(omega * g.nodes[j]);
        ss[j] = std::sin(omega * g.nodes[j]);
      }
      const TrigInterpolant ci{g, cs}, si{g, ss};
      for (int trial = 0; trial < 20; ++trial) {
        const double t = dist(rng);
        CHECK(std::abs(eval_interpolant(ci, t) - std::cos(omega * t)) <= 1e-11);
        if (k < N / 2) {
          // The Nyquist sine has zero samples and is not representable; all
          // lower sines are.
          CHECK(std::abs(eval_interpolant(si, t) - std::sin(omega * t)) <= 1e-11);
        }
      }
    }
  }
}

TEST_CASE("vector interpolation evaluates all components with one weight pass") {
  const int N = 8;
  const double T = 2.0 * kPi;
  const EquispacedGrid g = make_grid(N, T);

  Eigen::MatrixXd vals(N, 2);
  for (int j = 0; j < N; ++j) {
    vals(j, 0) = std::cos(g.nodes[j]);
    vals(j, 1) = std::sin(g.nodes[j]);
  }
  const double t = T / 3.0;
  const Eigen::VectorXd out = eval_vector_interpolant(vals, g, t);
  REQUIRE(out.size() == 2);
  CHECK(std::abs(out[0] - std::cos(t)) <= 1e-12);
  CHECK(std::abs(out[1] - std::sin(t)) <= 1e-12);

  // Constant columns come back as the constants everywhere.
  Eigen::MatrixXd consts(N, 3);
  consts.col(0).setConstant(1.0);
  consts.col(1).setConstant(-7.5);
  consts.col(2).setConstant(0.0);
  for (double tt : {0.0, 0.9, 4.4, T - 1e-3}) {
    const Eigen::VectorXd c = eval_vector_interpolant(consts, g, tt);
    CHECK(std::abs(c[0] - 1.0) <= 1e-12);
    CHECK(std::abs(c[1] + 7.5) <= 1e-11);
    CHECK(std::abs(c[2]) <= 1e-12);
  }

  // Single column agrees with the scalar path.
  Eigen::MatrixXd one_col = vals.col(0);
  const TrigInterpolant scalar{g, vals.col(0)};
  for (double tt : {0.11, 2.2, 5.9}) {
    CHECK(std::abs(eval_vector_interpolant(one_col, g, tt)[0] -
                   eval_interpolant(scalar, tt)) <= 1e-14);
  }

  Eigen::MatrixXd wrong(N + 2, 2);
  wrong.setZero();
  CHECK_THROWS_AS(eval_vector_interpolant(wrong, g, 0.5), std::invalid_argument);
}

TEST_CASE("DFT input length must match the grid") {
  const EquispacedGrid g = make_grid(8, 1.0);
  CHECK_THROWS_AS(dft_coefficients(Eigen::VectorXd::Zero(7), g), std::invalid_argument);
}
