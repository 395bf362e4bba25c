#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace fips {

enum class DerivativeMode { analytic, finite_difference };

/// Continuous-time periodic optimal-control problem on one period [0, T]:
/// minimize the period average of the running cost g subject to the dynamics
/// x' = f(x, u, t), path constraints c(x, u, t) <= 0, and T-periodicity of
/// x and u.
///
/// The running cost may additionally depend on the period mean of one control
/// component (`mean_control`); the cost and cost-derivative callbacks receive
/// that mean as their trailing argument (passed as 0.0 and to be ignored when
/// the marker is unset).  grad_cost_mean is d(g)/d(mean); leaving it empty
/// means the dependence is absent.
struct OcpProblem {
  int n = 0;  ///< state dimension
  int m = 0;  ///< control dimension
  int p = 0;  ///< number of path inequality constraints (0 allowed)
  double T = 0.0;

  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&, double)> dynamics;
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&, double, double)>
      running_cost;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&, double)>
      path_constraints;  ///< may be empty when p == 0

  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&, double)>
      jac_dynamics_x;  ///< n x n
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&, double)>
      jac_dynamics_u;  ///< n x m
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&, double, double)>
      grad_cost_x;  ///< length n
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&, double, double)>
      grad_cost_u;  ///< length m
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&, double, double)>
      grad_cost_mean;  ///< d g / d mean; empty means identically 0
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&, double)>
      jac_constraints_x;  ///< p x n
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&, double)>
      jac_constraints_u;  ///< p x m

  DerivativeMode derivative_mode = DerivativeMode::analytic;
  std::optional<int> mean_control;  ///< control index whose period mean feeds g

  /// Operating box the validation probes are drawn from.  Empty vectors fall
  /// back to [-1, 2] per coordinate.  Problems whose cost is large while some
  /// gradient entries are O(1) (ill-scaled for finite differences at
  /// unit-scale points) should set a physically meaningful box.
  Eigen::VectorXd probe_state_lo, probe_state_hi;
  Eigen::VectorXd probe_control_lo, probe_control_hi;
};

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string message;
};

struct ValidationReport {
  bool passed = true;
  std::vector<ValidationCheck> checks;

  void add(const std::string& name, bool ok, const std::string& message = "") {
    passed = passed && ok;
    checks.push_back({name, ok, message});
  }
};

namespace detail {

/// Uniform double in [0, 1) straight from the generator's bits.  The standard
/// distributions are implementation-defined; this keeps probe sequences
/// identical across standard libraries.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Eigen::VectorXd probe_vector(std::mt19937_64& rng, const Eigen::VectorXd& lo,
                                    const Eigen::VectorXd& hi, int dim) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) {
    const double a = (lo.size() == dim) ? lo[i] : -1.0;
    const double b = (hi.size() == dim) ? hi[i] : 2.0;
    v[i] = a + (b - a) * uniform01(rng);
  }
  return v;
}

/// Max absolute deviation between an analytic derivative block and its
/// central finite difference, relative to the block's own scale.
inline double relative_deviation(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& fd) {
  const double denom = std::max(1.0, fd.cwiseAbs().maxCoeff());
  return (analytic - fd).cwiseAbs().maxCoeff() / denom;
}

}  // namespace detail

/// Fill in any missing derivative callbacks with central finite differences
/// of the value callbacks (step 1e-6*(1+|value|) per coordinate).  Used by
/// the discretizer when derivative_mode == finite_difference; analytic
/// callbacks already present are kept.
inline OcpProblem with_finite_difference_derivatives(OcpProblem prob) {
  if (!prob.jac_dynamics_x) {
    auto f = prob.dynamics;
    int n = prob.n;
    prob.jac_dynamics_x = [f, n](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) {
      Eigen::MatrixXd jac(n, x.size());
      for (int i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::abs(x[i]));
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        jac.col(i) = (f(xp, u, t) - f(xm, u, t)) / (2.0 * h);
      }
      return jac;
    };
  }
  if (!prob.jac_dynamics_u) {
    auto f = prob.dynamics;
    int n = prob.n;
    prob.jac_dynamics_u = [f, n](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) {
      Eigen::MatrixXd jac(n, u.size());
      for (int i = 0; i < u.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::abs(u[i]));
        Eigen::VectorXd up = u, um = u;
        up[i] += h;
        um[i] -= h;
        jac.col(i) = (f(x, up, t) - f(x, um, t)) / (2.0 * h);
      }
      return jac;
    };
  }
  if (!prob.grad_cost_x) {
    auto g = prob.running_cost;
    prob.grad_cost_x = [g](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t,
                           double mean) {
      Eigen::VectorXd grad(x.size());
      for (int i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::abs(x[i]));
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        grad[i] = (g(xp, u, t, mean) - g(xm, u, t, mean)) / (2.0 * h);
      }
      return grad;
    };
  }
  if (!prob.grad_cost_u) {
    auto g = prob.running_cost;
    prob.grad_cost_u = [g](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t,
                           double mean) {
      Eigen::VectorXd grad(u.size());
      for (int i = 0; i < u.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::abs(u[i]));
        Eigen::VectorXd up = u, um = u;
        up[i] += h;
        um[i] -= h;
        grad[i] = (g(x, up, t, mean) - g(x, um, t, mean)) / (2.0 * h);
      }
      return grad;
    };
  }
  if (!prob.grad_cost_mean && prob.mean_control) {
    auto g = prob.running_cost;
    prob.grad_cost_mean = [g](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t,
                              double mean) {
      const double h = 1e-6 * (1.0 + std::abs(mean));
      return (g(x, u, t, mean + h) - g(x, u, t, mean - h)) / (2.0 * h);
    };
  }
  if (prob.p > 0 && !prob.jac_constraints_x) {
    auto c = prob.path_constraints;
    int p = prob.p;
    prob.jac_constraints_x = [c, p](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) {
      Eigen::MatrixXd jac(p, x.size());
      for (int i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::abs(x[i]));
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        jac.col(i) = (c(xp, u, t) - c(xm, u, t)) / (2.0 * h);
      }
      return jac;
    };
  }
  if (prob.p > 0 && !prob.jac_constraints_u) {
    auto c = prob.path_constraints;
    int p = prob.p;
    prob.jac_constraints_u = [c, p](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) {
      Eigen::MatrixXd jac(p, u.size());
      for (int i = 0; i < u.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::abs(u[i]));
        Eigen::VectorXd up = u, um = u;
        up[i] += h;
        um[i] -= h;
        jac.col(i) = (c(x, up, t) - c(x, um, t)) / (2.0 * h);
      }
      return jac;
    };
  }
  return prob;
}

/// Consistency report for an OcpProblem: callback presence, output shapes at
/// probe times {0, T/3, T}, and (in analytic mode) agreement of every
/// Jacobian/gradient with central finite differences (step 1e-6*(1+|value|))
/// to 1e-5 relative at 10 seeded probe points.  Failures are reported per
/// check, never thrown.
inline ValidationReport validate_problem(const OcpProblem& prob) {
  ValidationReport report;

  const bool dims_ok = prob.n > 0 && prob.m >= 0 && prob.p >= 0 && prob.T > 0.0;
  report.add("dimensions declared", dims_ok,
             dims_ok ? "" : "need n > 0, m >= 0, p >= 0, T > 0");
  if (!dims_ok) return report;

  if (prob.mean_control) {
    const bool ok = *prob.mean_control >= 0 && *prob.mean_control < prob.m;
    report.add("mean-coupled control index in range", ok,
               ok ? "" : "index " + std::to_string(*prob.mean_control) + " outside [0, " +
                             std::to_string(prob.m) + ")");
    if (!ok) return report;
  }

  report.add("dynamics callback present", static_cast<bool>(prob.dynamics));
  report.add("running_cost callback present", static_cast<bool>(prob.running_cost));
  if (prob.p > 0) {
    report.add("path_constraints callback present", static_cast<bool>(prob.path_constraints));
  }
  if (!report.passed) return report;

  std::mt19937_64 rng(0x0c9f5u);
  const Eigen::VectorXd x0 =
      detail::probe_vector(rng, prob.probe_state_lo, prob.probe_state_hi, prob.n);
  const Eigen::VectorXd u0 =
      detail::probe_vector(rng, prob.probe_control_lo, prob.probe_control_hi, prob.m);

  // Shape probes at three characteristic times.
  for (double t : {0.0, prob.T / 3.0, prob.T}) {
    try {
      const bool ok = prob.dynamics(x0, u0, t).size() == prob.n;
      report.add("dynamics output length at t=" + std::to_string(t), ok,
                 ok ? "" : "expected length " + std::to_string(prob.n));
    } catch (const std::exception& e) {
      report.add("dynamics output length at t=" + std::to_string(t), false, e.what());
    }
    if (prob.p > 0) {
      try {
        const bool ok = prob.path_constraints(x0, u0, t).size() == prob.p;
        report.add("path constraint count at t=" + std::to_string(t), ok,
                   ok ? "" : "expected length " + std::to_string(prob.p));
      } catch (const std::exception& e) {
        report.add("path constraint count at t=" + std::to_string(t), false, e.what());
      }
    }
  }

  auto check_shape = [&](const char* name, const auto& fn, int rows, int cols) {
    if (!fn) {
      report.add(std::string(name) + " present", false, "callback missing");
      return;
    }
    try {
      const Eigen::MatrixXd j = fn(x0, u0, prob.T / 3.0);
      const bool ok = j.rows() == rows && j.cols() == cols;
      report.add(std::string(name) + " shape", ok,
                 ok ? ""
                    : "expected " + std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                          std::to_string(j.rows()) + "x" + std::to_string(j.cols()));
    } catch (const std::exception& e) {
      report.add(std::string(name) + " shape", false, e.what());
    }
  };

  if (prob.derivative_mode == DerivativeMode::analytic) {
    check_shape("jac_dynamics_x", prob.jac_dynamics_x, prob.n, prob.n);
    check_shape("jac_dynamics_u", prob.jac_dynamics_u, prob.n, prob.m);
    if (prob.p > 0) {
      check_shape("jac_constraints_x", prob.jac_constraints_x, prob.p, prob.n);
      check_shape("jac_constraints_u", prob.jac_constraints_u, prob.p, prob.m);
    }
    if (!prob.grad_cost_x || !prob.grad_cost_u) {
      report.add("cost gradients present", false, "grad_cost_x/grad_cost_u missing");
    }
  }
  if (!report.passed) return report;

  if (prob.derivative_mode != DerivativeMode::analytic) return report;

  // Derivative cross-check: central differences at 10 seeded probe points.
  const double tol = 1e-5;
  double worst_dyn = 0.0, worst_cost = 0.0, worst_con = 0.0, worst_mean = 0.0;
  for (int probe = 0; probe < 10; ++probe) {
    const Eigen::VectorXd x =
        detail::probe_vector(rng, prob.probe_state_lo, prob.probe_state_hi, prob.n);
    const Eigen::VectorXd u =
        detail::probe_vector(rng, prob.probe_control_lo, prob.probe_control_hi, prob.m);
    const double t = prob.T * detail::uniform01(rng);
    const double mean =
        prob.mean_control
            ? detail::probe_vector(rng, prob.probe_control_lo, prob.probe_control_hi,
                                   prob.m)[*prob.mean_control]
            : 0.0;

    // Dynamics Jacobians.
    Eigen::MatrixXd fd_fx(prob.n, prob.n), fd_fu(prob.n, prob.m);
    for (int i = 0; i < prob.n; ++i) {
      const double h = 1e-6 * (1.0 + std::abs(x[i]));
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      fd_fx.col(i) = (prob.dynamics(xp, u, t) - prob.dynamics(xm, u, t)) / (2.0 * h);
    }
    for (int i = 0; i < prob.m; ++i) {
      const double h = 1e-6 * (1.0 + std::abs(u[i]));
      Eigen::VectorXd up = u, um = u;
      up[i] += h;
      um[i] -= h;
      fd_fu.col(i) = (prob.dynamics(x, up, t) - prob.dynamics(x, um, t)) / (2.0 * h);
    }
    worst_dyn = std::max(worst_dyn,
                         detail::relative_deviation(prob.jac_dynamics_x(x, u, t), fd_fx));
    worst_dyn = std::max(worst_dyn,
                         detail::relative_deviation(prob.jac_dynamics_u(x, u, t), fd_fu));

    // Cost gradients (including the mean-coupling channel).
    Eigen::VectorXd fd_gx(prob.n), fd_gu(prob.m);
    for (int i = 0; i < prob.n; ++i) {
      const double h = 1e-6 * (1.0 + std::abs(x[i]));
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      fd_gx[i] = (prob.running_cost(xp, u, t, mean) - prob.running_cost(xm, u, t, mean)) /
                 (2.0 * h);
    }
    for (int i = 0; i < prob.m; ++i) {
      const double h = 1e-6 * (1.0 + std::abs(u[i]));
      Eigen::VectorXd up = u, um = u;
      up[i] += h;
      um[i] -= h;
      fd_gu[i] = (prob.running_cost(x, up, t, mean) - prob.running_cost(x, um, t, mean)) /
                 (2.0 * h);
    }
    worst_cost = std::max(worst_cost,
                          detail::relative_deviation(prob.grad_cost_x(x, u, t, mean), fd_gx));
    worst_cost = std::max(worst_cost,
                          detail::relative_deviation(prob.grad_cost_u(x, u, t, mean), fd_gu));
    if (prob.grad_cost_mean) {
      const double h = 1e-6 * (1.0 + std::abs(mean));
      const double fd = (prob.running_cost(x, u, t, mean + h) -
                         prob.running_cost(x, u, t, mean - h)) /
                        (2.0 * h);
      const double dev = std::abs(prob.grad_cost_mean(x, u, t, mean) - fd) /
                         std::max(1.0, std::abs(fd));
      worst_mean = std::max(worst_mean, dev);
    }

    // Path-constraint Jacobians.
    if (prob.p > 0) {
      Eigen::MatrixXd fd_cx(prob.p, prob.n), fd_cu(prob.p, prob.m);
      for (int i = 0; i < prob.n; ++i) {
        const double h = 1e-6 * (1.0 + std::abs(x[i]));
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        fd_cx.col(i) =
            (prob.path_constraints(xp, u, t) - prob.path_constraints(xm, u, t)) / (2.0 * h);
      }
      for (int i = 0; i < prob.m; ++i) {
        const double h = 1e-6 * (1.0 + std::abs(u[i]));
        Eigen::VectorXd up = u, um = u;
        up[i] += h;
        um[i] -= h;
        fd_cu.col(i) =
            (prob.path_constraints(x, up, t) - prob.path_constraints(x, um, t)) / (2.0 * h);
      }
      worst_con = std::max(worst_con,
                           detail::relative_deviation(prob.jac_constraints_x(x, u, t), fd_cx));
      worst_con = std::max(worst_con,
                           detail::relative_deviation(prob.jac_constraints_u(x, u, t), fd_cu));
    }
  }

  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return std::string(buf);
  };
  report.add("dynamics Jacobians vs finite differences", worst_dyn <= tol,
             "max relative deviation " + fmt(worst_dyn));
  report.add("cost gradients vs finite differences", worst_cost <= tol,
             "max relative deviation " + fmt(worst_cost));
  if (prob.grad_cost_mean) {
    report.add("cost mean-derivative vs finite differences", worst_mean <= tol,
               "max relative deviation " + fmt(worst_mean));
  }
  if (prob.p > 0) {
    report.add("constraint Jacobians vs finite differences", worst_con <= tol,
               "max relative deviation " + fmt(worst_con));
  }
  return report;
}

}  // namespace fips
