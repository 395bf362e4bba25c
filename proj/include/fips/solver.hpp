#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "fips/discretize.hpp"

namespace fips {

/// Solver knobs.  Feasibility tolerances gate the `converged` status; the
/// step/objective tolerances reproduce the classic 1e-15 stopping rules.
/// `restarts` enables seeded multi-start: that many extra runs from the base
/// guess perturbed by uniform noise of amplitude 1, reduced deterministically
/// (converged beats non-converged, then lower objective, then lower index).
struct SolverConfig {
  int max_outer_iters = 100;
  int max_inner_iters = 500;
  double eq_tolerance = 1e-9;
  double ineq_tolerance = 1e-9;
  double step_tolerance = 1e-15;
  double objective_tolerance = 1e-15;
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  std::optional<Eigen::VectorXd> initial_guess;  ///< all ones when unset
  std::uint64_t seed = 0;
  int restarts = 0;

  void validate() const {
    if (max_outer_iters < 1 || max_inner_iters < 1) {
      throw std::invalid_argument("SolverConfig: iteration limits must be >= 1");
    }
    for (double tol : {eq_tolerance, ineq_tolerance, step_tolerance, objective_tolerance}) {
      if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tolerances must be positive");
    }
    if (!(initial_penalty > 0.0)) {
      throw std::invalid_argument("SolverConfig: initial_penalty must be positive");
    }
    if (!(penalty_growth > 1.0)) {
      throw std::invalid_argument("SolverConfig: penalty_growth must exceed 1");
    }
    if (restarts < 0) throw std::invalid_argument("SolverConfig: restarts must be >= 0");
  }
};

/// Load a SolverConfig from a flat key=value file.  Blank lines and lines
/// starting with '#' are skipped; every key is optional; unknown keys are
/// rejected.  `initial_guess=ones` is the only accepted spelling for the
/// guess (vectors are not expressible in the flat format).
inline SolverConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("parse_config_file: cannot open '" + path + "'");
  SolverConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("parse_config_file: line " + std::to_string(lineno) +
                                  " is not key=value: '" + line + "'");
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "max_outer_iters") cfg.max_outer_iters = std::stoi(value);
      else if (key == "max_inner_iters") cfg.max_inner_iters = std::stoi(value);
      else if (key == "eq_tolerance") cfg.eq_tolerance = std::stod(value);
      else if (key == "ineq_tolerance") cfg.ineq_tolerance = std::stod(value);
      else if (key == "step_tolerance") cfg.step_tolerance = std::stod(value);
      else if (key == "objective_tolerance") cfg.objective_tolerance = std::stod(value);
      else if (key == "initial_penalty") cfg.initial_penalty = std::stod(value);
      else if (key == "penalty_growth") cfg.penalty_growth = std::stod(value);
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
      else if (key == "restarts") cfg.restarts = std::stoi(value);
      else if (key == "initial_guess") {
        if (value != "ones") {
          throw std::invalid_argument("only 'ones' is accepted for initial_guess");
        }
        cfg.initial_guess.reset();
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("parse_config_file: line " + std::to_string(lineno) + ": " +
                                  e.what());
    }
  }
  cfg.validate();
  return cfg;
}

/// Augmented Lagrangian (Powell-Hestenes-Rockafellar form) of the NLP:
///
///   L = f + lambda'h + (rho/2)||h||^2
///       + (1/(2 rho)) * sum_i [ max(0, mu_i + rho*g_i)^2 - mu_i^2 ]
///
/// equivalent to the slack formulation c + s = 0, s >= 0 with the slacks
/// minimized out analytically.  Returns the value and writes the gradient.
inline double augmented_lagrangian(const DiscreteNlp& nlp, const Eigen::VectorXd& z,
                                   const Eigen::VectorXd& lambda, const Eigen::VectorXd& mu,
                                   double rho, Eigen::VectorXd& grad) {
  double value = nlp.objective(z);
  grad = nlp.objective_gradient(z);
  if (nlp.num_eq > 0) {
    const Eigen::VectorXd h = nlp.eq_constraints(z);
    value += lambda.dot(h) + 0.5 * rho * h.squaredNorm();
    grad.noalias() += nlp.eq_jacobian(z).transpose() * (lambda + rho * h);
  }
  if (nlp.num_ineq > 0) {
    const Eigen::VectorXd g = nlp.ineq_constraints(z);
    const Eigen::VectorXd active = (mu + rho * g).cwiseMax(0.0);
    value += (active.squaredNorm() - mu.squaredNorm()) / (2.0 * rho);
    grad.noalias() += nlp.ineq_jacobian(z).transpose() * active;
  }
  return value;
}

/// First-order optimality diagnostics at (z, multipliers).
struct KktResiduals {
  double stationarity_inf = 0.0;
  double eq_inf = 0.0;
  double ineq_violation = 0.0;
  double complementarity_inf = 0.0;
};

inline KktResiduals kkt_residuals(const DiscreteNlp& nlp, const Eigen::VectorXd& z,
                                  const Eigen::VectorXd& eq_multipliers,
                                  const Eigen::VectorXd& ineq_multipliers) {
  if (z.size() != nlp.num_vars || eq_multipliers.size() != nlp.num_eq ||
      ineq_multipliers.size() != nlp.num_ineq) {
    throw std::invalid_argument("kkt_residuals: shape mismatch with the NLP");
  }
  KktResiduals r;
  Eigen::VectorXd stat = nlp.objective_gradient(z);
  if (nlp.num_eq > 0) {
    const Eigen::VectorXd h = nlp.eq_constraints(z);
    r.eq_inf = h.lpNorm<Eigen::Infinity>();
    stat.noalias() += nlp.eq_jacobian(z).transpose() * eq_multipliers;
  }
  if (nlp.num_ineq > 0) {
    const Eigen::VectorXd g = nlp.ineq_constraints(z);
    r.ineq_violation = std::max(0.0, g.maxCoeff());
    r.complementarity_inf = (ineq_multipliers.array() * g.array()).abs().maxCoeff();
    stat.noalias() += nlp.ineq_jacobian(z).transpose() * ineq_multipliers;
  }
  r.stationarity_inf = stat.lpNorm<Eigen::Infinity>();
  return r;
}

namespace detail {

struct InnerResult {
  Eigen::VectorXd z;
  double f = 0.0;
  Eigen::VectorXd grad;
  int iters = 0;
  bool reached_tolerance = false;  // gradient tolerance or small-step/objective exit
};

/// Limited-memory BFGS (memory 10) with Armijo backtracking.  Stops on the
/// gradient infinity-norm tolerance, on a step or objective decrease below
/// the configured 1e-15-style thresholds, on line-search failure, or on the
/// iteration cap.  The two-loop direction falls back to steepest descent
/// whenever curvature information fails to produce a descent direction.
inline InnerResult lbfgs_minimize(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& value_and_grad,
    const Eigen::VectorXd& z0, double grad_tol, int max_iters, double step_tol, double obj_tol) {
  constexpr int kMemory = 10;
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktracks = 60;

  InnerResult res;
  res.z = z0;
  res.f = value_and_grad(res.z, res.grad);
  std::vector<Eigen::VectorXd> S, Y;
  std::vector<double> rho_sy;

  for (int it = 0; it < max_iters; ++it) {
    if (res.grad.lpNorm<Eigen::Infinity>() <= grad_tol) {
      res.iters = it;
      res.reached_tolerance = true;
      return res;
    }

    // Two-loop recursion.
    Eigen::VectorXd q = res.grad;
    const int hist = static_cast<int>(S.size());
    std::vector<double> alpha(hist);
    for (int i = hist - 1; i >= 0; --i) {
      alpha[i] = rho_sy[i] * S[i].dot(q);
      q.noalias() -= alpha[i] * Y[i];
    }
    if (hist > 0) {
      q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    }
    for (int i = 0; i < hist; ++i) {
      const double beta = rho_sy[i] * Y[i].dot(q);
      q.noalias() += (alpha[i] - beta) * S[i];
    }
    Eigen::VectorXd d = -q;
    double slope = d.dot(res.grad);
    if (slope >= 0.0) {
      d = -res.grad;
      slope = d.dot(res.grad);
    }

    double step = 1.0;
    Eigen::VectorXd zn, gn;
    double fn = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      zn = res.z + step * d;
      fn = value_and_grad(zn, gn);
      if (std::isfinite(fn) && fn <= res.f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.iters = it;
      res.reached_tolerance = false;
      return res;
    }

    const Eigen::VectorXd s = zn - res.z;
    const Eigen::VectorXd y = gn - res.grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      S.push_back(s);
      Y.push_back(y);
      rho_sy.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > kMemory) {
        S.erase(S.begin());
        Y.erase(Y.begin());
        rho_sy.erase(rho_sy.begin());
      }
    }
    const double dz = s.norm();
    const double df = std::abs(fn - res.f);
    res.z = std::move(zn);
    res.f = fn;
    res.grad = std::move(gn);
    if (dz < step_tol || df < obj_tol) {
      res.iters = it + 1;
      res.reached_tolerance = true;
      return res;
    }
  }
  res.iters = max_iters;
  res.reached_tolerance = false;
  return res;
}

inline double uniform_pm1(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace detail

namespace detail {

/// One full augmented-Lagrangian run from a given start point.
inline SolveReport alm_single_run(const DiscreteNlp& nlp, const SolverConfig& config,
                                  const Eigen::VectorXd& z0) {
  constexpr double kPenaltyCap = 1e12;
  constexpr double kOmegaStart = 1e-4;   // inner gradient tolerance schedule
  constexpr double kOmegaFloor = 1e-12;
  constexpr double kStationarityTol = 1e-6;

  SolveReport report;
  report.z = z0;

  // Reject non-finite starts immediately.
  {
    bool finite = std::isfinite(nlp.objective(z0));
    if (finite && nlp.num_eq > 0) finite = nlp.eq_constraints(z0).allFinite();
    if (finite && nlp.num_ineq > 0) finite = nlp.ineq_constraints(z0).allFinite();
    if (!finite) {
      report.solver_status = SolverStatus::stalled;
      report.diagnostic = "objective or constraints non-finite at the initial guess";
      report.J_N = nlp.objective(z0);
      return report;
    }
  }

  Eigen::VectorXd z = z0;
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(nlp.num_eq);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(nlp.num_ineq);
  double rho = config.initial_penalty;
  double omega = kOmegaStart;
  double prev_viol = std::numeric_limits<double>::infinity();
  double prev_outer_obj = std::numeric_limits<double>::quiet_NaN();
  int total_inner = 0;
  int stall_count = 0;
  SolverStatus status = SolverStatus::max_iter;

  for (int outer = 0; outer < config.max_outer_iters; ++outer) {
    auto merit = [&](const Eigen::VectorXd& zz, Eigen::VectorXd& grad) {
      return augmented_lagrangian(nlp, zz, lambda, mu, rho, grad);
    };
    const Eigen::VectorXd z_before = z;
    const InnerResult inner = lbfgs_minimize(merit, z, omega, config.max_inner_iters,
                                             config.step_tolerance, config.objective_tolerance);
    z = inner.z;
    total_inner += inner.iters;

    const Eigen::VectorXd h =
        nlp.num_eq > 0 ? nlp.eq_constraints(z) : Eigen::VectorXd();
    const Eigen::VectorXd g =
        nlp.num_ineq > 0 ? nlp.ineq_constraints(z) : Eigen::VectorXd();
    const double eq_viol = nlp.num_eq > 0 ? h.lpNorm<Eigen::Infinity>() : 0.0;
    const double ineq_viol = nlp.num_ineq > 0 ? std::max(0.0, g.maxCoeff()) : 0.0;
    const double obj = nlp.objective(z);
    report.outer_trace.push_back({eq_viol, ineq_viol, rho, inner.iters, obj});

    const bool feasible =
        eq_viol <= config.eq_tolerance && ineq_viol <= config.ineq_tolerance;
    const double outer_dz = (z - z_before).norm();
    const double outer_df = std::abs(obj - prev_outer_obj);  // NaN on first pass
    // The merit gradient at the inner solver's exit equals the KKT
    // stationarity residual at the about-to-be-updated multipliers, so for
    // constrained problems feasibility plus a small exit gradient is a full
    // first-order optimality certificate.  Unconstrained problems skip that
    // shortcut and keep polishing down to the step/objective tolerances.
    const bool stationary = nlp.num_eq + nlp.num_ineq > 0 &&
                            inner.grad.lpNorm<Eigen::Infinity>() <= kStationarityTol;
    if (feasible && (inner.iters == 0 || stationary || outer_dz <= config.step_tolerance ||
                     outer_df <= config.objective_tolerance)) {
      status = SolverStatus::converged;
      break;
    }

    // Stall detection: no movement while infeasible, with the penalty capped.
    if (outer_dz <= config.step_tolerance && !feasible && rho >= kPenaltyCap) {
      if (++stall_count >= 3) {
        status = SolverStatus::stalled;
        report.diagnostic = "no progress at the penalty cap while infeasible";
        break;
      }
    } else {
      stall_count = 0;
    }

    if (nlp.num_eq > 0) lambda.noalias() += rho * h;
    if (nlp.num_ineq > 0) mu = (mu + rho * g).cwiseMax(0.0);
    const double viol = std::max(eq_viol, ineq_viol);
    // Escalate only while actually infeasible: once h sits at roundoff, a
    // growing penalty would amplify that noise into macroscopic multiplier
    // jitter (rho * h) and the iterates would never settle.
    if (!feasible && viol > prev_viol / 4.0) {
      rho = std::min(rho * config.penalty_growth, kPenaltyCap);
    }
    prev_viol = viol;
    prev_outer_obj = obj;
    omega = std::max(omega / 10.0, kOmegaFloor);
  }

  report.z = z;
  report.eq_multipliers = lambda;
  report.ineq_multipliers = mu;
  report.solver_iters = total_inner;
  report.solver_status = status;
  report.J_N = nlp.objective(z);
  return report;
}

}  // namespace detail

/// Solve the NLP by the augmented-Lagrangian method with an L-BFGS inner
/// loop.  Deterministic: identical (nlp, config) inputs produce the same
/// iterates bitwise; the optional multi-start draws its perturbations from a
/// generator seeded only by config.seed.
inline SolveReport solve(const DiscreteNlp& nlp, const SolverConfig& config) {
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();

  Eigen::VectorXd z0 = config.initial_guess ? *config.initial_guess
                                            : Eigen::VectorXd::Ones(nlp.num_vars);
  if (z0.size() != nlp.num_vars) {
    throw std::invalid_argument("solve: initial guess has length " + std::to_string(z0.size()) +
                                ", expected " + std::to_string(nlp.num_vars));
  }

  SolveReport best = detail::alm_single_run(nlp, config, z0);
  int best_index = 0;
  if (config.restarts > 0) {
    std::mt19937_64 rng(config.seed);
    for (int r = 1; r <= config.restarts; ++r) {
      Eigen::VectorXd zr = z0;
      for (int i = 0; i < zr.size(); ++i) zr[i] += detail::uniform_pm1(rng);
      SolveReport cand = detail::alm_single_run(nlp, config, zr);
      const bool cand_conv = cand.solver_status == SolverStatus::converged;
      const bool best_conv = best.solver_status == SolverStatus::converged;
      const bool better = (cand_conv && !best_conv) ||
                          (cand_conv == best_conv && cand.J_N < best.J_N);
      if (better) {
        best = std::move(cand);
        best_index = r;
      }
    }
  }
  (void)best_index;

  // Decode trajectories and the feasibility error.
  if (nlp.n > 0 && nlp.num_vars == (nlp.n + nlp.m) * nlp.N) {
    best.x_nodes = nlp.state_matrix(best.z);
    best.u_nodes = nlp.control_matrix(best.z);
  }
  if (nlp.adfe_eval) {
    best.adfe = nlp.adfe_eval(best.z);
    best.adfe_inf = best.adfe.size() > 0 ? best.adfe.maxCoeff() : 0.0;
  }
  best.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return best;
}

}  // namespace fips
