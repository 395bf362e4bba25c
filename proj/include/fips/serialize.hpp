#pragma once

#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "fips/discretize.hpp"
#include "fips/error_bounds.hpp"
#include "fips/integration.hpp"

namespace fips {

/// Full round-trip decimal form of a double (17 significant digits), used for
/// every CSV number so re-parsing reproduces the exact bits.
inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline const char* fim_kind_name(FimKind kind) {
  switch (kind) {
    case FimKind::square: return "square";
    case FimKind::rectangular: return "rectangular";
    case FimKind::terminal_row: return "terminal_row";
  }
  return "unknown";
}

/// Matrix dump: {kind, N, T, eval_points, entries (row-major), max_imag_residual}.
inline nlohmann::ordered_json fim_to_json(const IntegrationMatrix& mat) {
  nlohmann::ordered_json j;
  j["kind"] = fim_kind_name(mat.kind);
  j["N"] = mat.grid.N;
  j["T"] = mat.grid.T;
  j["eval_points"] = std::vector<double>(mat.eval_points.begin(), mat.eval_points.end());
  std::vector<double> entries;
  entries.reserve(mat.entries.size());
  for (int r = 0; r < mat.entries.rows(); ++r) {
    for (int c = 0; c < mat.entries.cols(); ++c) entries.push_back(mat.entries(r, c));
  }
  j["entries"] = entries;
  j["max_imag_residual"] = mat.max_imag_residual;
  return j;
}

inline std::string fim_to_csv(const IntegrationMatrix& mat) {
  std::string out;
  for (int r = 0; r < mat.entries.rows(); ++r) {
    for (int c = 0; c < mat.entries.cols(); ++c) {
      if (c > 0) out += ',';
      out += format_full(mat.entries(r, c));
    }
    out += '\n';
  }
  return out;
}

/// Convergence-study CSV: header + one row per N.  The bound column is left
/// empty for functions analytic on every strip (no finite bound applies).
inline std::string convergence_report_to_csv(const ConvergenceReport& report) {
  std::string out = "N,inf_error,euclid_error,bound\n";
  for (std::size_t i = 0; i < report.N_values.size(); ++i) {
    out += std::to_string(report.N_values[i]);
    out += ',';
    out += format_full(report.inf_errors[i]);
    out += ',';
    out += format_full(report.euclid_errors[i]);
    out += ',';
    if (!report.bound_values.empty()) out += format_full(report.bound_values[i]);
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json convergence_report_to_json(const ConvergenceReport& report) {
  nlohmann::ordered_json j;
  j["function_id"] = report.function_id;
  j["N_values"] = report.N_values;
  j["inf_errors"] = report.inf_errors;
  j["euclid_errors"] = report.euclid_errors;
  if (!report.bound_values.empty()) j["bound_values"] = report.bound_values;
  return j;
}

/// Solve-report JSON: {N, T, J_N, adfe_inf, solver_status, solver_iters,
/// x_nodes, u_nodes} plus wall_time_s only when requested — wall time is
/// nondeterministic, and default outputs are byte-stable across runs.
inline nlohmann::ordered_json report_to_json(const SolveReport& report,
                                             const EquispacedGrid& grid,
                                             bool include_timing = false) {
  nlohmann::ordered_json j;
  j["N"] = grid.N;
  j["T"] = grid.T;
  j["J_N"] = report.J_N;
  j["adfe_inf"] = report.adfe_inf;
  j["solver_status"] = to_string(report.solver_status);
  j["solver_iters"] = report.solver_iters;
  if (include_timing) j["wall_time_s"] = report.wall_time_s;
  auto matrix_rows = [](const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> rows;
    rows.reserve(m.rows());
    for (int r = 0; r < m.rows(); ++r) {
      rows.emplace_back(m.row(r).begin(), m.row(r).end());
    }
    return rows;
  };
  j["x_nodes"] = matrix_rows(report.x_nodes);
  j["u_nodes"] = matrix_rows(report.u_nodes);
  return j;
}

/// Solve-report CSV: one row per node with time, states, controls, and the
/// per-state feasibility error components.
inline std::string report_to_csv(const SolveReport& report, const EquispacedGrid& grid,
                                 bool include_timing = false) {
  const int n = static_cast<int>(report.x_nodes.cols());
  const int m = static_cast<int>(report.u_nodes.cols());
  std::string out = "t";
  for (int i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  for (int c = 1; c <= m; ++c) out += ",u" + std::to_string(c);
  for (int i = 1; i <= n; ++i) out += ",adfe" + std::to_string(i);
  out += '\n';
  for (int j = 0; j < grid.N; ++j) {
    out += format_full(grid.nodes[j]);
    for (int i = 0; i < n; ++i) out += ',' + format_full(report.x_nodes(j, i));
    for (int c = 0; c < m; ++c) out += ',' + format_full(report.u_nodes(j, c));
    for (int i = 0; i < n; ++i) {
      const double value =
          report.adfe.size() == static_cast<Eigen::Index>(n) * grid.N ? report.adfe[i * grid.N + j]
                                                                      : 0.0;
      out += ',' + format_full(value);
    }
    out += '\n';
  }
  out += "# J_N=" + format_full(report.J_N) + " adfe_inf=" + format_full(report.adfe_inf) +
         " solver_status=" + to_string(report.solver_status) +
         " solver_iters=" + std::to_string(report.solver_iters);
  if (include_timing) out += " wall_time_s=" + format_full(report.wall_time_s);
  out += '\n';
  return out;
}

}  // namespace fips
