#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "fips/fourier.hpp"
#include "fips/grid.hpp"
#include "fips/integration.hpp"
#include "fips/ocp.hpp"

namespace fips {

enum class SolverStatus { converged, max_iter, stalled };

inline std::string to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::max_iter: return "max_iter";
    case SolverStatus::stalled: return "stalled";
  }
  return "unknown";
}

/// One outer (multiplier-update) iteration of the solver, kept for
/// diagnostics and property tests.
struct OuterIterate {
  double eq_inf = 0.0;      ///< ||equalities||_inf at the iteration's end
  double ineq_viol = 0.0;   ///< max positive inequality violation
  double penalty = 0.0;     ///< penalty parameter used this iteration
  int inner_iters = 0;      ///< quasi-Newton steps the inner solve took
  double objective = 0.0;
};

/// Result of a solve: nodal trajectories, discrete objective, the integral
/// dynamics residual (ADFE), and solver diagnostics.  The trailing fields
/// (raw decision vector, multipliers, trace) are not serialized.
struct SolveReport {
  Eigen::MatrixXd x_nodes;  ///< N x n
  Eigen::MatrixXd u_nodes;  ///< N x m
  double J_N = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd adfe;     ///< length n*N, elementwise |residual|
  double adfe_inf = 0.0;
  int solver_iters = 0;
  SolverStatus solver_status = SolverStatus::stalled;
  double wall_time_s = 0.0;

  Eigen::VectorXd z;                 ///< final decision vector
  Eigen::VectorXd eq_multipliers;
  Eigen::VectorXd ineq_multipliers;
  std::vector<OuterIterate> outer_trace;
  std::string diagnostic;
};

/// The transcribed NLP.  Decision vector layout (component-major):
///
///   z = [x_1 at all nodes; ...; x_n at all nodes; u_1 at all nodes; ...]
///
/// so z has (n+m)*N entries.  Equalities stack the n collocated
/// integral-dynamics blocks (x_i - x_i(0)*1 - Theta*F_i = 0, N rows each;
/// the l = 0 row is trivially 0 = 0 and kept for uniform indexing), followed
/// by n optional zero-mean rows ((T/N)*sum_j f_i(t_j) = 0) when
/// enforce_periodicity is set.  Inequalities stack node-major: row j*p + i is
/// constraint i at node j; feasible means <= 0.
struct DiscreteNlp {
  int N = 0;
  EquispacedGrid grid;
  IntegrationMatrix fim;           ///< square
  IntegrationMatrix terminal_row;  ///< 1 x N, entries T/N
  int n = 0, m = 0, p = 0;
  int num_vars = 0;
  int num_eq = 0;
  int num_ineq = 0;
  bool enforce_periodicity = true;
  double T = 0.0;

  std::function<double(const Eigen::VectorXd&)> objective;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> objective_gradient;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eq_constraints;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> eq_jacobian;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> ineq_constraints;  ///< empty if none
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> ineq_jacobian;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> adfe_eval;  ///< set by discretize()

  Eigen::MatrixXd state_matrix(const Eigen::VectorXd& z) const {
    Eigen::MatrixXd X(N, n);
    for (int i = 0; i < n; ++i) X.col(i) = z.segment(i * N, N);
    return X;
  }
  Eigen::MatrixXd control_matrix(const Eigen::VectorXd& z) const {
    Eigen::MatrixXd U(N, m);
    for (int c = 0; c < m; ++c) U.col(c) = z.segment((n + c) * N, N);
    return U;
  }
};

/// Absolute discrete feasibility error: elementwise |x_i(0) + (Theta*F)_i -
/// x_i| over all states and nodes (length n*N, component-major), where F
/// holds the dynamics sampled at the nodal trajectory.  Zero iff the nodal
/// trajectory satisfies the collocated integral dynamics exactly.
inline Eigen::VectorXd compute_adfe(const OcpProblem& prob, const EquispacedGrid& grid,
                                    const IntegrationMatrix& fim, const Eigen::MatrixXd& x_nodes,
                                    const Eigen::MatrixXd& u_nodes) {
  const int N = grid.N;
  if (x_nodes.rows() != N || x_nodes.cols() != prob.n || u_nodes.rows() != N ||
      u_nodes.cols() != prob.m) {
    throw std::invalid_argument("compute_adfe: nodal trajectory shapes do not match the problem");
  }
  if (fim.entries.rows() != N || fim.entries.cols() != N) {
    throw std::invalid_argument("compute_adfe: need the square integration matrix");
  }
  Eigen::MatrixXd F(N, prob.n);
  for (int j = 0; j < N; ++j) {
    F.row(j) = prob.dynamics(x_nodes.row(j).transpose(), u_nodes.row(j).transpose(), grid.nodes[j])
            .transpose();
  }
  Eigen::VectorXd out(prob.n * N);
  for (int i = 0; i < prob.n; ++i) {
    out.segment(i * N, N) =
        (Eigen::VectorXd::Constant(N, x_nodes(0, i)) + fim.entries * F.col(i) - x_nodes.col(i))
            .cwiseAbs();
  }
  return out;
}

/// Transcribe a periodic OCP into the finite-dimensional NLP at N nodes.
///
/// The objective is the quadrature average (1/N)*sum_j g(x_j, u_j, t_j);
/// derivatives are assembled by chain rule — the integration matrix enters
/// the equalities linearly, so the equality Jacobian is the pointwise
/// dynamics Jacobians column-scaled by Theta.  When the problem declares a
/// mean-coupled control, the discrete mean (1/N)*sum_j u_c,j is substituted
/// into the cost and its 1/N-per-node chain-rule term into the gradient.
inline DiscreteNlp discretize(const OcpProblem& prob_in, int N, bool enforce_periodicity = true) {
  const OcpProblem prob = (prob_in.derivative_mode == DerivativeMode::finite_difference)
                              ? with_finite_difference_derivatives(prob_in)
                              : prob_in;
  {
    const ValidationReport v = validate_problem(prob);
    if (!v.passed) {
      std::string names;
      for (const auto& c : v.checks) {
        if (!c.passed) names += (names.empty() ? "" : ", ") + c.name;
      }
      throw std::invalid_argument("discretize: problem validation failed: " + names);
    }
  }
  if (N < 4 || N % 2 != 0) {
    throw std::invalid_argument("discretize: node count must be even and >= 4, got " +
                                std::to_string(N));
  }

  DiscreteNlp nlp;
  nlp.N = N;
  nlp.grid = make_grid(N, prob.T);
  nlp.fim = build_square_fim(nlp.grid);
  nlp.terminal_row = terminal_quadrature(nlp.grid);
  nlp.n = prob.n;
  nlp.m = prob.m;
  nlp.p = prob.p;
  nlp.num_vars = (prob.n + prob.m) * N;
  nlp.num_eq = prob.n * N + (enforce_periodicity ? prob.n : 0);
  nlp.num_ineq = prob.p * N;
  nlp.enforce_periodicity = enforce_periodicity;
  nlp.T = prob.T;

  // Shared snapshot captured by every callback.
  struct Ctx {
    OcpProblem prob;
    EquispacedGrid grid;
    Eigen::MatrixXd theta;  // square FIM entries
    int N, n, m, p;
    bool periodicity;

    Eigen::MatrixXd states(const Eigen::VectorXd& z) const {
      Eigen::MatrixXd X(N, n);
      for (int i = 0; i < n; ++i) X.col(i) = z.segment(i * N, N);
      return X;
    }
    Eigen::MatrixXd controls(const Eigen::VectorXd& z) const {
      Eigen::MatrixXd U(N, m);
      for (int c = 0; c < m; ++c) U.col(c) = z.segment((n + c) * N, N);
      return U;
    }
    double mean_value(const Eigen::MatrixXd& U) const {
      return prob.mean_control ? U.col(*prob.mean_control).mean() : 0.0;
    }
    Eigen::MatrixXd dynamics_samples(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U) const {
      Eigen::MatrixXd F(N, n);
      for (int j = 0; j < N; ++j) {
        F.row(j) = prob.dynamics(X.row(j).transpose(), U.row(j).transpose(), grid.nodes[j]).transpose();
      }
      return F;
    }
    void check_len(const Eigen::VectorXd& z) const {
      if (z.size() != (n + m) * N) {
        throw std::invalid_argument("DiscreteNlp: decision vector has length " +
                                    std::to_string(z.size()) + ", expected " +
                                    std::to_string((n + m) * N));
      }
    }
  };
  auto ctx = std::make_shared<Ctx>(Ctx{prob, nlp.grid, nlp.fim.entries, N, prob.n, prob.m,
                                       prob.p, enforce_periodicity});

  nlp.objective = [ctx](const Eigen::VectorXd& z) -> double {
    ctx->check_len(z);
    const Eigen::MatrixXd X = ctx->states(z);
    const Eigen::MatrixXd U = ctx->controls(z);
    const double mean = ctx->mean_value(U);
    double acc = 0.0;
    for (int j = 0; j < ctx->N; ++j) {
      acc += ctx->prob.running_cost(X.row(j).transpose(), U.row(j).transpose(),
                                    ctx->grid.nodes[j], mean);
    }
    return acc / static_cast<double>(ctx->N);
  };

  nlp.objective_gradient = [ctx](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    ctx->check_len(z);
    const int N = ctx->N, n = ctx->n, m = ctx->m;
    const Eigen::MatrixXd X = ctx->states(z);
    const Eigen::MatrixXd U = ctx->controls(z);
    const double mean = ctx->mean_value(U);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero((n + m) * N);
    double mean_channel = 0.0;  // sum over nodes of d g / d mean
    for (int j = 0; j < N; ++j) {
      const double t = ctx->grid.nodes[j];
      const Eigen::VectorXd gx = ctx->prob.grad_cost_x(X.row(j).transpose(), U.row(j).transpose(), t, mean);
      const Eigen::VectorXd gu = ctx->prob.grad_cost_u(X.row(j).transpose(), U.row(j).transpose(), t, mean);
      for (int i = 0; i < n; ++i) grad[i * N + j] = gx[i];
      for (int c = 0; c < m; ++c) grad[(n + c) * N + j] = gu[c];
      if (ctx->prob.mean_control && ctx->prob.grad_cost_mean) {
        mean_channel += ctx->prob.grad_cost_mean(X.row(j).transpose(), U.row(j).transpose(), t, mean);
      }
    }
    grad /= static_cast<double>(N);
    if (ctx->prob.mean_control && ctx->prob.grad_cost_mean) {
      // d mean / d u_c,j = 1/N for every node, on top of the 1/N quadrature
      // weight already applied above.
      const int c = *ctx->prob.mean_control;
      grad.segment((n + c) * N, N).array() +=
          mean_channel / (static_cast<double>(N) * static_cast<double>(N));
    }
    return grad;
  };

  nlp.eq_constraints = [ctx](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    ctx->check_len(z);
    const int N = ctx->N, n = ctx->n;
    const Eigen::MatrixXd X = ctx->states(z);
    const Eigen::MatrixXd U = ctx->controls(z);
    const Eigen::MatrixXd F = ctx->dynamics_samples(X, U);
    Eigen::VectorXd h(n * N + (ctx->periodicity ? n : 0));
    for (int i = 0; i < n; ++i) {
      h.segment(i * N, N) =
          X.col(i) - Eigen::VectorXd::Constant(N, X(0, i)) - ctx->theta * F.col(i);
    }
    if (ctx->periodicity) {
      const double w = ctx->grid.T / static_cast<double>(N);
      for (int i = 0; i < n; ++i) h[n * N + i] = w * F.col(i).sum();
    }
    return h;
  };

  nlp.eq_jacobian = [ctx](const Eigen::VectorXd& z) -> Eigen::MatrixXd {
    ctx->check_len(z);
    const int N = ctx->N, n = ctx->n, m = ctx->m;
    const Eigen::MatrixXd X = ctx->states(z);
    const Eigen::MatrixXd U = ctx->controls(z);
    std::vector<Eigen::MatrixXd> A(N), B(N);  // pointwise dynamics Jacobians
    for (int j = 0; j < N; ++j) {
      A[j] = ctx->prob.jac_dynamics_x(X.row(j).transpose(), U.row(j).transpose(), ctx->grid.nodes[j]);
      B[j] = ctx->prob.jac_dynamics_u(X.row(j).transpose(), U.row(j).transpose(), ctx->grid.nodes[j]);
    }
    const int rows = n * N + (ctx->periodicity ? n : 0);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(rows, (n + m) * N);
    const double w = ctx->grid.T / static_cast<double>(N);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        auto block = J.block(i * N, k * N, N, N);
        for (int j = 0; j < N; ++j) block.col(j) = -ctx->theta.col(j) * A[j](i, k);
        if (i == k) {
          block.diagonal().array() += 1.0;
          block.col(0).array() -= 1.0;
        }
      }
      for (int c = 0; c < m; ++c) {
        auto block = J.block(i * N, (n + c) * N, N, N);
        for (int j = 0; j < N; ++j) block.col(j) = -ctx->theta.col(j) * B[j](i, c);
      }
      if (ctx->periodicity) {
        for (int j = 0; j < N; ++j) {
          for (int k = 0; k < n; ++k) J(n * N + i, k * N + j) = w * A[j](i, k);
          for (int c = 0; c < m; ++c) J(n * N + i, (n + c) * N + j) = w * B[j](i, c);
        }
      }
    }
    return J;
  };

  if (prob.p > 0) {
    nlp.ineq_constraints = [ctx](const Eigen::VectorXd& z) -> Eigen::VectorXd {
      ctx->check_len(z);
      const int N = ctx->N, p = ctx->p;
      const Eigen::MatrixXd X = ctx->states(z);
      const Eigen::MatrixXd U = ctx->controls(z);
      Eigen::VectorXd g(p * N);
      for (int j = 0; j < N; ++j) {
        g.segment(j * p, p) = ctx->prob.path_constraints(X.row(j).transpose(), U.row(j).transpose(),
                                                  ctx->grid.nodes[j]);
      }
      return g;
    };
    nlp.ineq_jacobian = [ctx](const Eigen::VectorXd& z) -> Eigen::MatrixXd {
      ctx->check_len(z);
      const int N = ctx->N, n = ctx->n, m = ctx->m, p = ctx->p;
      const Eigen::MatrixXd X = ctx->states(z);
      const Eigen::MatrixXd U = ctx->controls(z);
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(p * N, (n + m) * N);
      for (int j = 0; j < N; ++j) {
        const double t = ctx->grid.nodes[j];
        const Eigen::MatrixXd Cx = ctx->prob.jac_constraints_x(X.row(j).transpose(), U.row(j).transpose(), t);
        const Eigen::MatrixXd Cu = ctx->prob.jac_constraints_u(X.row(j).transpose(), U.row(j).transpose(), t);
        for (int i = 0; i < p; ++i) {
          for (int k = 0; k < n; ++k) J(j * p + i, k * N + j) = Cx(i, k);
          for (int c = 0; c < m; ++c) J(j * p + i, (n + c) * N + j) = Cu(i, c);
        }
      }
      return J;
    };
  }

  nlp.adfe_eval = [ctx](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    ctx->check_len(z);
    IntegrationMatrix fim;
    fim.kind = FimKind::square;
    fim.grid = ctx->grid;
    fim.eval_points = ctx->grid.nodes;
    fim.entries = ctx->theta;
    return compute_adfe(ctx->prob, ctx->grid, fim, ctx->states(z), ctx->controls(z));
  };

  return nlp;
}

/// Evaluate the interpolated solution trajectories at an arbitrary time.
/// Returns (states, controls); both are T-periodic in t.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> recover_solution(const SolveReport& report,
                                                                    const EquispacedGrid& grid,
                                                                    double t) {
  Eigen::VectorXd x, u;
  if (report.x_nodes.cols() > 0) x = eval_vector_interpolant(report.x_nodes, grid, t);
  if (report.u_nodes.cols() > 0) u = eval_vector_interpolant(report.u_nodes, grid, t);
  return {x, u};
}

}  // namespace fips
