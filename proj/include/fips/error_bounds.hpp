#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "fips/grid.hpp"
#include "fips/integration.hpp"

namespace fips {

/// A T-periodic test function analytic on the strip |Im z| <= beta around the
/// real axis, bundled with its exact cumulative integral from 0 (the ground
/// truth the quadrature is measured against).
///
/// beta = +infinity marks functions analytic on every strip (band-limited
/// trigonometric polynomials); the exponential error bound then degenerates
/// to zero and sup_norm_on_strip is NaN/unused.
struct AnalyticTestFunction {
  std::string id;
  double T = 0.0;
  double beta = 0.0;
  double sup_norm_on_strip = 0.0;
  std::function<double(double)> evaluator;
  std::function<double(double)> exact_cumulative;
};

/// Convergence-study results for one test function over a list of grid sizes.
struct ConvergenceReport {
  std::string function_id;
  std::vector<int> N_values;
  std::vector<double> inf_errors;
  std::vector<double> euclid_errors;
  std::vector<double> bound_values;  ///< empty when beta is infinite
};

/// Strip-geometry prefactor of the quadrature error bound:
///
///   mu(T, beta) = sqrt(2*T*(sqrt(coth(w)) + coth(w))),   w = 2*pi*beta/T.
///
/// Monotonically decreasing in beta with limit 2*sqrt(T) as beta -> infinity.
inline double mu_factor(double T, double beta) {
  if (!(T > 0.0)) {
    throw std::invalid_argument("mu_factor: period must be positive, got " + std::to_string(T));
  }
  if (!(beta > 0.0)) {
    throw std::invalid_argument("mu_factor: strip half-width must be positive, got " +
                                std::to_string(beta));
  }
  const double w = 2.0 * std::numbers::pi * beta / T;
  const double coth = 1.0 / std::tanh(w);
  return std::sqrt(2.0 * T * (std::sqrt(coth) + coth));
}

/// A-priori upper bound on the Euclidean norm of the cumulative-quadrature
/// error over all nodes, for a function analytic on the closed strip of
/// half-width beta:
///
///   bound = mu(T, beta) * sup|f| * exp(-pi*N*beta/T) * sqrt(sum_j t_j).
inline double fpsq_error_bound(const AnalyticTestFunction& f, int N, const EquispacedGrid& grid) {
  if (std::isinf(f.beta)) {
    throw std::invalid_argument(
        "fpsq_error_bound: function '" + f.id +
        "' is analytic on every strip; the finite-strip bound degenerates to zero "
        "and does not apply");
  }
  if (grid.N != N) {
    throw std::invalid_argument("fpsq_error_bound: grid size " + std::to_string(grid.N) +
                                " does not match N = " + std::to_string(N));
  }
  if (std::abs(grid.T - f.T) > 1e-12 * f.T) {
    throw std::invalid_argument("fpsq_error_bound: grid period does not match the function's");
  }
  const double root_sum_nodes = std::sqrt(grid.nodes.sum());
  return mu_factor(f.T, f.beta) * f.sup_norm_on_strip *
         std::exp(-std::numbers::pi * static_cast<double>(N) * f.beta / f.T) * root_sum_nodes;
}

namespace detail {

/// Study of a single grid size: build the square FIM, integrate the sampled
/// function cumulatively, compare against the exact antiderivative at every
/// node.
inline void study_one(const AnalyticTestFunction& f, int N, double& inf_err, double& euc_err,
                      double& bound) {
  const EquispacedGrid grid = make_grid(N, f.T);
  const IntegrationMatrix fim = build_square_fim(grid);
  Eigen::VectorXd samples(N), truth(N);
  for (int j = 0; j < N; ++j) {
    samples[j] = f.evaluator(grid.nodes[j]);
    truth[j] = f.exact_cumulative(grid.nodes[j]);
  }
  const Eigen::VectorXd err = apply_quadrature(fim, samples) - truth;
  inf_err = err.lpNorm<Eigen::Infinity>();
  euc_err = err.norm();
  bound = std::isinf(f.beta) ? 0.0 : fpsq_error_bound(f, N, grid);
}

}  // namespace detail

/// Run the convergence study over a list of (even) grid sizes.  Distinct N
/// values are independent and evaluated in parallel; `threads` caps the
/// worker count (0 = hardware concurrency).  Results are written by index,
/// so the report is identical for any thread count.
inline ConvergenceReport run_convergence_study(const AnalyticTestFunction& f,
                                               const std::vector<int>& N_list, int threads = 0) {
  for (int N : N_list) {
    if (N < 2 || N % 2 != 0) {
      throw std::invalid_argument("run_convergence_study: grid sizes must be even and >= 2, got " +
                                  std::to_string(N));
    }
  }
  ConvergenceReport report;
  report.function_id = f.id;
  report.N_values = N_list;
  const int count = static_cast<int>(N_list.size());
  report.inf_errors.resize(count);
  report.euclid_errors.resize(count);
  std::vector<double> bounds(count);

  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) {
      detail::study_one(f, N_list[i], report.inf_errors[i], report.euclid_errors[i], bounds[i]);
    }
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (int i = w; i < count; i += workers) {
          detail::study_one(f, N_list[i], report.inf_errors[i], report.euclid_errors[i],
                            bounds[i]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  if (!std::isinf(f.beta)) report.bound_values = std::move(bounds);
  return report;
}

/// Band-limited reference: f(t) = 2*sin(3t - 1) + 1 on T = 2*pi/3 (a single
/// mode plus DC, so interpolation and quadrature are exact for every N >= 4).
inline AnalyticTestFunction test_function_f1() {
  AnalyticTestFunction f;
  f.id = "f1";
  f.T = 2.0 * std::numbers::pi / 3.0;
  f.beta = std::numeric_limits<double>::infinity();
  f.sup_norm_on_strip = std::numeric_limits<double>::quiet_NaN();
  f.evaluator = [](double t) { return 2.0 * std::sin(3.0 * t - 1.0) + 1.0; };
  f.exact_cumulative = [](double t) {
    return (std::cos(1.0) - std::cos(3.0 * t - 1.0)) * (2.0 / 3.0) + t;
  };
  return f;
}

/// f(t) = 1/(2 - cos t) on T = 2*pi.  Nearest complex singularities at
/// t = 2*pi*k +- i*ln(2 + sqrt(3)); the strip half-width is taken 0.1% inside
/// that, so f is analytic on the closed strip.  The strip sup-norm is
/// attained at (x, y) = (0, +-beta) and is hard-coded from the grid search in
/// scripts/compute_strip_norms.py.
///
/// The cumulative integral uses a branch-free continuous form of the
/// half-angle antiderivative: the correction atan stays in (-pi/2, pi/2)
/// because its denominator cos^2 + sqrt(3)*sin^2 is always positive, so no
/// branch bookkeeping across t = pi is needed.
inline AnalyticTestFunction test_function_f2() {
  AnalyticTestFunction f;
  f.id = "f2";
  f.T = 2.0 * std::numbers::pi;
  f.beta = 0.999 * std::log(2.0 + std::sqrt(3.0));
  f.sup_norm_on_strip = 438.73036750718506;  // scripts/compute_strip_norms.py
  f.evaluator = [](double t) { return 1.0 / (2.0 - std::cos(t)); };
  f.exact_cumulative = [](double t) {
    const double root3 = std::sqrt(3.0);
    const double s = std::sin(0.5 * t);
    const double c = std::cos(0.5 * t);
    const double corr = std::atan(((root3 - 1.0) * s * c) / (c * c + root3 * s * s));
    return (2.0 / root3) * (0.5 * t + corr);
  };
  return f;
}

/// f(t) = 1/(sin(t)^2 + 16) on T = pi.  Nearest singularities at
/// t = pi*k +- i*asinh(4) (where sin^2 = -16); strip half-width 0.1% inside.
/// Sup-norm from scripts/compute_strip_norms.py, attained at (0, +-beta).
/// Cumulative integral in the same branch-free continuous form as f2.
inline AnalyticTestFunction test_function_f3() {
  AnalyticTestFunction f;
  f.id = "f3";
  f.T = std::numbers::pi;
  f.beta = 0.999 * std::asinh(4.0);
  f.sup_norm_on_strip = 14.503437291856466;  // scripts/compute_strip_norms.py
  f.evaluator = [](double t) {
    const double s = std::sin(t);
    return 1.0 / (s * s + 16.0);
  };
  f.exact_cumulative = [](double t) {
    const double root17 = std::sqrt(17.0);
    const double gamma = root17 / 4.0;
    const double s = std::sin(t);
    const double c = std::cos(t);
    const double corr = std::atan(((gamma - 1.0) * s * c) / (c * c + gamma * s * s));
    return (t + corr) / (4.0 * root17);
  };
  return f;
}

/// Look up a built-in test function by id ("f1", "f2", "f3").
inline AnalyticTestFunction test_function_by_id(const std::string& id) {
  if (id == "f1") return test_function_f1();
  if (id == "f2") return test_function_f2();
  if (id == "f3") return test_function_f3();
  throw std::invalid_argument("test_function_by_id: unknown id '" + id +
                              "' (expected f1, f2, or f3)");
}

}  // namespace fips
