#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Core>

#include "fips/ocp.hpp"

namespace fips {

/// Double-integrator periodic benchmark: n = 2, m = 1, no path constraints.
/// Dynamics x1' = x2, x2' = u; running cost
///   g = 0.5*x1^2 + 0.25*x2^4 - 0.5*x2^2 + 0.5*b*u^2.
/// The quartic/negative-quadratic x2 terms make the problem nonconvex: the
/// static origin is a local solution with J = 0, and genuinely periodic
/// orbits with J < 0 exist for suitable (b, T).
struct Problem1Params {
  double b = 0.2475;  ///< control weighting
  double T = 4.431736;
};

inline OcpProblem make_problem1(const Problem1Params& params = {}) {
  if (!(params.b > 0.0)) throw std::invalid_argument("make_problem1: b must be positive");
  if (!(params.T > 0.0)) throw std::invalid_argument("make_problem1: T must be positive");
  const double b = params.b;

  OcpProblem prob;
  prob.n = 2;
  prob.m = 1;
  prob.p = 0;
  prob.T = params.T;
  prob.derivative_mode = DerivativeMode::analytic;

  prob.dynamics = [](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double) {
    Eigen::VectorXd f(2);
    f << x[1], u[0];
    return f;
  };
  prob.running_cost = [b](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double, double) {
    const double x2sq = x[1] * x[1];
    return 0.5 * x[0] * x[0] + 0.25 * x2sq * x2sq - 0.5 * x2sq + 0.5 * b * u[0] * u[0];
  };
  prob.jac_dynamics_x = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
    Eigen::MatrixXd j(2, 2);
    j << 0.0, 1.0, 0.0, 0.0;
    return j;
  };
  prob.jac_dynamics_u = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
    Eigen::MatrixXd j(2, 1);
    j << 0.0, 1.0;
    return j;
  };
  prob.grad_cost_x = [](const Eigen::VectorXd& x, const Eigen::VectorXd&, double, double) {
    Eigen::VectorXd g(2);
    g << x[0], x[1] * x[1] * x[1] - x[1];
    return g;
  };
  prob.grad_cost_u = [b](const Eigen::VectorXd&, const Eigen::VectorXd& u, double, double) {
    Eigen::VectorXd g(1);
    g << b * u[0];
    return g;
  };
  return prob;
}

/// Solar heating benchmark: a collector/storage/enclosure system driven by a
/// 24 h weather cycle, n = 2 states (enclosure and storage temperatures,
/// deg C), m = 2 controls (auxiliary heat and storage extraction rate, kJ/h),
/// p = 4 path constraints.
struct Problem2Params {
  double UA_S = 20.07;    ///< storage loss coefficient, kJ/(degC h)
  double UA_E = 949.5;    ///< enclosure loss coefficient, kJ/(degC h)
  double mCp_S = 19000.0; ///< storage thermal capacity, kJ/degC
  double mCp_E = 18890.0; ///< enclosure thermal capacity, kJ/degC
  double Tbar_S = 30.0;   ///< storage temperature setpoint, degC
  double Tbar_E = 20.0;   ///< enclosure temperature setpoint, degC
  double T = 24.0;        ///< period, h
  double omega = std::numbers::pi / 12.0;  ///< diurnal frequency, 1/h
  double u1_lower = 8000.0;                ///< auxiliary heater lower bound, kJ/h
  double eps_u2 = 2.2204e-16;              ///< strict-positivity margin for u2
};

/// Ambient temperature disturbance, degC.
inline double problem2_ambient(double t, const Problem2Params& params = {}) {
  return -10.0 * std::sin(params.omega * t);
}

/// Collected solar input, kJ/h.
inline double problem2_insolation(double t, const Problem2Params& params = {}) {
  return 13333.0 * (1.0 - std::cos(params.omega * t));
}

/// Cost: g = 1000*(x1 - Tbar_E)^2 + 10*(x2 - Tbar_S)^2 + 0.1*(u1 - u1_mean)^2
///       + u1, where u1_mean is the period mean of the auxiliary heat — the
/// mean-coupled control channel.  Constraints c <= 0 keep both temperatures
/// nonnegative, the auxiliary heat above its turndown limit, and the storage
/// extraction strictly positive.
inline OcpProblem make_problem2(const Problem2Params& params = {}) {
  for (double v : {params.UA_S, params.UA_E, params.mCp_S, params.mCp_E, params.Tbar_S,
                   params.Tbar_E, params.T, params.omega, params.u1_lower, params.eps_u2}) {
    if (!(v > 0.0)) throw std::invalid_argument("make_problem2: all parameters must be positive");
  }
  const Problem2Params pm = params;

  OcpProblem prob;
  prob.n = 2;
  prob.m = 2;
  prob.p = 4;
  prob.T = pm.T;
  prob.derivative_mode = DerivativeMode::analytic;
  prob.mean_control = 0;  // u1's period mean enters the cost

  prob.dynamics = [pm](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) {
    const double TA = problem2_ambient(t, pm);
    Eigen::VectorXd f(2);
    f[0] = (u[0] + u[1] - pm.UA_E * (x[0] - TA)) / pm.mCp_E;
    f[1] = (problem2_insolation(t, pm) - u[1] - pm.UA_S * (x[1] - TA)) / pm.mCp_S;
    return f;
  };
  prob.running_cost = [pm](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double,
                           double u1_mean) {
    const double de = x[0] - pm.Tbar_E;
    const double ds = x[1] - pm.Tbar_S;
    const double du = u[0] - u1_mean;
    return 1000.0 * de * de + 10.0 * ds * ds + 0.1 * du * du + u[0];
  };
  prob.path_constraints = [pm](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double) {
    Eigen::VectorXd c(4);
    c << -x[0], -x[1], pm.u1_lower - u[0], pm.eps_u2 - u[1];
    return c;
  };
  prob.jac_dynamics_x = [pm](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
    Eigen::MatrixXd j(2, 2);
    j << -pm.UA_E / pm.mCp_E, 0.0, 0.0, -pm.UA_S / pm.mCp_S;
    return j;
  };
  prob.jac_dynamics_u = [pm](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
    Eigen::MatrixXd j(2, 2);
    j << 1.0 / pm.mCp_E, 1.0 / pm.mCp_E, 0.0, -1.0 / pm.mCp_S;
    return j;
  };
  prob.grad_cost_x = [pm](const Eigen::VectorXd& x, const Eigen::VectorXd&, double, double) {
    Eigen::VectorXd g(2);
    g << 2000.0 * (x[0] - pm.Tbar_E), 20.0 * (x[1] - pm.Tbar_S);
    return g;
  };
  prob.grad_cost_u = [pm](const Eigen::VectorXd&, const Eigen::VectorXd& u, double,
                          double u1_mean) {
    Eigen::VectorXd g(2);
    g << 0.2 * (u[0] - u1_mean) + 1.0, 0.0;
    return g;
  };
  prob.grad_cost_mean = [](const Eigen::VectorXd&, const Eigen::VectorXd& u, double,
                           double u1_mean) { return -0.2 * (u[0] - u1_mean); };
  prob.jac_constraints_x = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(4, 2);
    j(0, 0) = -1.0;
    j(1, 1) = -1.0;
    return j;
  };
  prob.jac_constraints_u = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(4, 2);
    j(2, 0) = -1.0;
    j(3, 1) = -1.0;
    return j;
  };

  // Finite-difference validation probes live where the plant operates:
  // temperatures near their setpoints, heat rates in the equipment range.
  // The cost is O(1e5..1e7) there, so the |value|-scaled FD steps are needed
  // to keep cancellation error below the validation tolerance.
  prob.probe_state_lo = Eigen::Vector2d(15.0, 25.0);
  prob.probe_state_hi = Eigen::Vector2d(25.0, 35.0);
  prob.probe_control_lo = Eigen::Vector2d(5.0e3, 5.0e3);
  prob.probe_control_hi = Eigen::Vector2d(2.5e4, 2.5e4);
  return prob;
}

}  // namespace fips
