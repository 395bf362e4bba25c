#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "fips/ocp.hpp"
#include "fips/problems.hpp"

using namespace fips;
namespace {

bool has_failed_check(const ValidationReport& report, const std::string& name_part,
                      std::string* detail = nullptr) {
  for (const auto& c : report.checks) {
    if (!c.passed && c.name.find(name_part) != std::string::npos) {
      if (detail) *detail = c.message;
      return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("benchmark problems pass validation") {
  const ValidationReport r1 = validate_problem(make_problem1());
  CHECK(r1.passed);
  for (const auto& c : r1.checks) {
    INFO("check: ", c.name, " detail: ", c.message);
    CHECK(c.passed);
  }

  const ValidationReport r2 = validate_problem(make_problem2());
  CHECK(r2.passed);
  for (const auto& c : r2.checks) {
    INFO("check: ", c.name, " detail: ", c.message);
    CHECK(c.passed);
  }
}

TEST_CASE("validation reports its checks by name") {
  const ValidationReport r = validate_problem(make_problem1());
  auto has = [&](const std::string& part) {
    return std::any_of(r.checks.begin(), r.checks.end(),
                       [&](const ValidationCheck& c) { return c.name.find(part) != std::string::npos; });
  };
  CHECK(has("dimensions declared"));
  CHECK(has("dynamics callback present"));
  CHECK(has("jac_dynamics_x shape"));
  CHECK(has("dynamics Jacobians vs finite differences"));
  CHECK(has("cost gradients vs finite differences"));
}

TEST_CASE("missing dimensions fail fast") {
  OcpProblem prob;  // all dims zero
  const ValidationReport r = validate_problem(prob);
  CHECK_FALSE(r.passed);
  CHECK(has_failed_check(r, "dimensions declared"));
}

TEST_CASE("missing callbacks are reported") {
  OcpProblem prob;
  prob.n = 1;
  prob.m = 1;
  prob.p = 0;
  prob.T = 1.0;
  const ValidationReport r = validate_problem(prob);
  CHECK_FALSE(r.passed);
  CHECK(has_failed_check(r, "dynamics callback present"));
  CHECK(has_failed_check(r, "running_cost callback present"));
}

TEST_CASE("a wrongly shaped Jacobian is caught with its shape in the report") {
  OcpProblem prob = make_problem1();
  prob.jac_dynamics_x = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
    return Eigen::MatrixXd::Zero(1, 2);
  };
  const ValidationReport r = validate_problem(prob);
  CHECK_FALSE(r.passed);
  std::string detail;
  REQUIRE(has_failed_check(r, "jac_dynamics_x shape", &detail));
  CHECK(detail.find("expected 2x2") != std::string::npos);
  CHECK(detail.find("1x2") != std::string::npos);
}

TEST_CASE("an inconsistent analytic gradient is caught by the derivative cross-check") {
  OcpProblem prob = make_problem1();
  auto good = prob.grad_cost_x;
  prob.grad_cost_x = [good](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t,
                            double mean) {
    Eigen::VectorXd g = good(x, u, t, mean);
    g[0] += 0.1;
    return g;
  };
  const ValidationReport r = validate_problem(prob);
  CHECK_FALSE(r.passed);
  CHECK(has_failed_check(r, "cost gradients vs finite differences"));
}

TEST_CASE("an inconsistent dynamics Jacobian is caught") {
  OcpProblem prob = make_problem2();
  auto good = prob.jac_dynamics_u;
  prob.jac_dynamics_u = [good](const Eigen::VectorXd& x, const Eigen::VectorXd& u, double t) {
    Eigen::MatrixXd j = good(x, u, t);
    j(0, 0) *= 2.0;
    return j;
  };
  const ValidationReport r = validate_problem(prob);
  CHECK_FALSE(r.passed);
  CHECK(has_failed_check(r, "dynamics Jacobians vs finite differences"));
}

TEST_CASE("a throwing callback is reported, not propagated") {
  OcpProblem prob = make_problem1();
  prob.dynamics = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double) -> Eigen::VectorXd {
    throw std::runtime_error("deliberate failure");
  };
  ValidationReport r;
  CHECK_NOTHROW(r = validate_problem(prob));
  CHECK_FALSE(r.passed);
  std::string detail;
  CHECK(has_failed_check(r, "dynamics output length", &detail));
  CHECK(detail.find("deliberate failure") != std::string::npos);
}

TEST_CASE("finite-difference mode skips the analytic cross-check") {
  OcpProblem prob = make_problem1();
  prob.derivative_mode = DerivativeMode::finite_difference;
  prob.jac_dynamics_x = nullptr;
  prob.jac_dynamics_u = nullptr;
  prob.grad_cost_x = nullptr;
  prob.grad_cost_u = nullptr;
  const ValidationReport r = validate_problem(prob);
  CHECK(r.passed);
  for (const auto& c : r.checks) {
    CHECK(c.name.find("finite differences") == std::string::npos);
  }
}

TEST_CASE("finite-difference fallback synthesizes consistent derivatives") {
  OcpProblem prob = make_problem2();
  prob.derivative_mode = DerivativeMode::finite_difference;
  prob.jac_dynamics_x = nullptr;
  prob.jac_dynamics_u = nullptr;
  prob.grad_cost_x = nullptr;
  prob.grad_cost_u = nullptr;
  prob.grad_cost_mean = nullptr;
  prob.jac_constraints_x = nullptr;
  prob.jac_constraints_u = nullptr;

  OcpProblem filled = with_finite_difference_derivatives(prob);
  REQUIRE(static_cast<bool>(filled.jac_dynamics_x));
  REQUIRE(static_cast<bool>(filled.grad_cost_mean));

  // Compare the synthesized derivatives against the hand-coded ones from the
  // reference problem at a few operating points.
  const OcpProblem exact = make_problem2();
  for (double t : {0.0, 5.0, 17.5}) {
    Eigen::VectorXd x(2), u(2);
    x << 21.0, 29.0;
    u << 9000.0, 12000.0;
    const double mean = 8800.0;

    const Eigen::MatrixXd jx_fd = filled.jac_dynamics_x(x, u, t);
    const Eigen::MatrixXd jx = exact.jac_dynamics_x(x, u, t);
    CHECK((jx_fd - jx).cwiseAbs().maxCoeff() <= 1e-5 * (1.0 + jx.cwiseAbs().maxCoeff()));

    const Eigen::VectorXd gu_fd = filled.grad_cost_u(x, u, t, mean);
    const Eigen::VectorXd gu = exact.grad_cost_u(x, u, t, mean);
    CHECK((gu_fd - gu).cwiseAbs().maxCoeff() <= 1e-4 * (1.0 + gu.cwiseAbs().maxCoeff()));

    const double gm_fd = filled.grad_cost_mean(x, u, t, mean);
    const double gm = exact.grad_cost_mean(x, u, t, mean);
    CHECK(std::abs(gm_fd - gm) <= 1e-4 * (1.0 + std::abs(gm)));
  }

  // Hand-written callbacks already present are kept, not replaced.
  OcpProblem partial = make_problem2();
  partial.derivative_mode = DerivativeMode::finite_difference;
  auto original = partial.jac_dynamics_u;
  OcpProblem refilled = with_finite_difference_derivatives(partial);
  Eigen::VectorXd x(2), u(2);
  x << 20.0, 30.0;
  u << 8000.0, 8000.0;
  CHECK((refilled.jac_dynamics_u(x, u, 1.0) - original(x, u, 1.0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("problem callbacks are pure: repeated calls give identical bits") {
  const OcpProblem prob = make_problem2();
  Eigen::VectorXd x(2), u(2);
  x << 19.3, 31.7;
  u << 8123.0, 15000.0;
  const double t = 7.25, mean = 9000.0;

  const Eigen::VectorXd f1 = prob.dynamics(x, u, t);
  const Eigen::VectorXd f2 = prob.dynamics(x, u, t);
  CHECK((f1 - f2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(prob.running_cost(x, u, t, mean) == prob.running_cost(x, u, t, mean));
  CHECK((prob.path_constraints(x, u, t) - prob.path_constraints(x, u, t)).cwiseAbs().maxCoeff() ==
        0.0);

  // Validation itself is deterministic.
  const ValidationReport a = validate_problem(prob);
  const ValidationReport b = validate_problem(prob);
  REQUIRE(a.checks.size() == b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    CHECK(a.checks[i].passed == b.checks[i].passed);
    CHECK(a.checks[i].message == b.checks[i].message);
  }
}

TEST_CASE("mean-coupling marker is validated") {
  OcpProblem prob = make_problem2();
  prob.mean_control = 5;  // out of range for m = 2
  const ValidationReport r = validate_problem(prob);
  CHECK_FALSE(r.passed);
  CHECK(has_failed_check(r, "mean"));
}
