// Command-line front end for the periodic pseudospectral toolkit: quadrature
// convergence studies, integration-matrix dumps, the two benchmark solves,
// and problem validation.
//
// Exit codes: 0 success, 1 bad usage or invalid input, 2 solver finished
// without reaching the converged status (the report is still written).

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fips/fips.hpp"

namespace {

struct NRange {
  int start = 10, step = 10, stop = 100;
};

NRange parse_n_range(const std::string& text) {
  NRange r;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> r.start)) throw CLI::ValidationError("--n", "expected start:step:stop, got '" + text + "'");
  if (in >> c1) {
    if (c1 != ':' || !(in >> r.step >> c2 >> r.stop) || c2 != ':') {
      throw CLI::ValidationError("--n", "expected start:step:stop, got '" + text + "'");
    }
  } else {
    r.step = 1;
    r.stop = r.start;
  }
  if (r.start < 2 || r.step < 1 || r.stop < r.start) {
    throw CLI::ValidationError("--n", "need start >= 2, step >= 1, stop >= start");
  }
  return r;
}

std::vector<int> expand_n_range(const NRange& r) {
  std::vector<int> out;
  for (int N = r.start; N <= r.stop; N += r.step) out.push_back(N);
  return out;
}

std::vector<std::string> split_csv_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << text;
}

// Insert a per-function tag before the extension: out.csv -> out_f1.csv.
std::string tagged_path(const std::string& base, const std::string& tag) {
  const auto dot = base.find_last_of('.');
  const auto slash = base.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return base + "_" + tag;
  }
  return base.substr(0, dot) + "_" + tag + base.substr(dot);
}

int env_threads() {
  if (const char* env = std::getenv("FIPS_THREADS")) {
    try {
      return std::max(0, std::stoi(env));
    } catch (const std::exception&) {
      return 0;
    }
  }
  return 0;
}

void print_solve_summary(const fips::SolveReport& report) {
  std::cerr << "J_N=" << fips::format_full(report.J_N)
            << " adfe_inf=" << fips::format_full(report.adfe_inf)
            << " status=" << fips::to_string(report.solver_status)
            << " iters=" << report.solver_iters << " wall=" << report.wall_time_s << "s\n";
}

int emit_solve_report(const fips::SolveReport& report, const fips::EquispacedGrid& grid,
                      const std::string& format, const std::string& output, bool timing) {
  std::string text;
  if (format == "json") {
    text = fips::report_to_json(report, grid, timing).dump(2) + "\n";
  } else {
    text = fips::report_to_csv(report, grid, timing);
  }
  if (output.empty()) {
    std::cout << text;
  } else {
    write_text(output, text);
  }
  print_solve_summary(report);
  return report.solver_status == fips::SolverStatus::converged ? 0 : 2;
}

int run_quad_study(const std::string& functions, const std::string& n_text, int threads,
                   const std::string& output, const std::string& format) {
  const std::vector<int> N_list = expand_n_range(parse_n_range(n_text));
  const std::vector<std::string> ids = split_csv_list(functions);
  if (ids.empty()) throw CLI::ValidationError("--functions", "empty function list");

  std::vector<fips::ConvergenceReport> reports;
  reports.reserve(ids.size());
  for (const std::string& id : ids) {
    reports.push_back(fips::run_convergence_study(fips::test_function_by_id(id), N_list, threads));
  }

  if (format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(fips::convergence_report_to_json(r));
    const std::string text = arr.dump(2) + "\n";
    if (output.empty()) {
      std::cout << text;
    } else {
      write_text(output, text);
    }
    return 0;
  }

  if (output.empty()) {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      if (reports.size() > 1) std::cout << "# " << reports[i].function_id << "\n";
      std::cout << fips::convergence_report_to_csv(reports[i]);
    }
  } else if (reports.size() == 1) {
    write_text(output, fips::convergence_report_to_csv(reports[0]));
  } else {
    for (const auto& r : reports) {
      write_text(tagged_path(output, r.function_id), fips::convergence_report_to_csv(r));
    }
  }
  return 0;
}

int run_fim_dump(int N, double T, const std::string& kind, const std::string& points,
                 const std::string& output, const std::string& format) {
  const fips::EquispacedGrid grid = fips::make_grid(N, T);
  fips::IntegrationMatrix mat;
  if (kind == "square") {
    mat = fips::build_square_fim(grid);
  } else if (kind == "terminal") {
    mat = fips::terminal_quadrature(grid);
  } else if (kind == "rectangular") {
    const std::vector<std::string> items = split_csv_list(points);
    if (items.empty()) {
      throw CLI::ValidationError("--points", "rectangular dump needs a comma-separated list");
    }
    Eigen::VectorXd ys(static_cast<Eigen::Index>(items.size()));
    for (std::size_t i = 0; i < items.size(); ++i) ys[static_cast<Eigen::Index>(i)] = std::stod(items[i]);
    mat = fips::build_rectangular_fim(grid, ys);
  } else {
    throw CLI::ValidationError("--kind", "expected square, rectangular, or terminal");
  }

  const std::string text = format == "csv" ? fips::fim_to_csv(mat)
                                           : fips::fim_to_json(mat).dump(2) + "\n";
  if (output.empty()) {
    std::cout << text;
  } else {
    write_text(output, text);
  }
  return 0;
}

int run_validate(const std::string& which) {
  fips::OcpProblem prob;
  if (which == "p1") {
    prob = fips::make_problem1();
  } else if (which == "p2") {
    prob = fips::make_problem2();
  } else {
    throw CLI::ValidationError("--problem", "expected p1 or p2");
  }
  const fips::ValidationReport report = fips::validate_problem(prob);
  for (const auto& check : report.checks) {
    std::cout << (check.passed ? "ok   " : "FAIL ") << check.name;
    if (!check.message.empty()) std::cout << " (" << check.message << ")";
    std::cout << "\n";
  }
  std::cout << (report.passed ? "validation passed\n" : "validation FAILED\n");
  return report.passed ? 0 : 1;
}

fips::SolverConfig load_config(const std::string& path) {
  return path.empty() ? fips::SolverConfig{} : fips::parse_config_file(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic pseudospectral optimal control toolkit"};
  app.require_subcommand(1);

  // quad-study
  auto* study = app.add_subcommand("quad-study", "Quadrature convergence study");
  std::string study_functions = "f1,f2,f3";
  std::string study_n = "10:10:100";
  int study_threads = env_threads();
  std::string study_output, study_format = "csv";
  study->add_option("--functions", study_functions, "Comma list of test functions (f1,f2,f3)");
  study->add_option("--n", study_n, "Grid sizes start:step:stop (or a single N)");
  study->add_option("--threads", study_threads, "Worker threads (0 = hardware)");
  study->add_option("--output", study_output, "Output file (default stdout)");
  study->add_option("--format", study_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // fim-dump
  auto* dump = app.add_subcommand("fim-dump", "Dump an integration matrix");
  int dump_n = 8;
  double dump_T = 1.0;
  std::string dump_kind = "square", dump_points, dump_output, dump_format = "json";
  dump->add_option("--n", dump_n, "Grid size (even, >= 2)");
  dump->add_option("--T", dump_T, "Period");
  dump->add_option("--kind", dump_kind, "square, rectangular, or terminal");
  dump->add_option("--points", dump_points, "Comma list of upper limits (rectangular only)");
  dump->add_option("--output", dump_output, "Output file (default stdout)");
  dump->add_option("--format", dump_format, "json or csv")
      ->check(CLI::IsMember({"csv", "json"}));

  // solve-p1
  auto* p1 = app.add_subcommand("solve-p1", "Solve the periodic oscillator benchmark");
  int p1_n = 12;
  double p1_b = 0.2475, p1_T = 4.431736;
  bool p1_no_periodicity = false;
  bool p1_timing = false;
  std::string p1_config, p1_output, p1_format = "csv";
  p1->add_option("--n", p1_n, "Grid size (even, >= 4)");
  p1->add_option("--b", p1_b, "Control weighting");
  p1->add_option("--T", p1_T, "Period");
  p1->add_flag("--no-periodicity", p1_no_periodicity, "Drop the zero-mean dynamics rows");
  p1->add_flag("--timing", p1_timing, "Include wall time in the report output");
  p1->add_option("--config", p1_config, "Solver config file (key=value lines)");
  p1->add_option("--output", p1_output, "Output file (default stdout)");
  p1->add_option("--format", p1_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  // solve-p2
  auto* p2 = app.add_subcommand("solve-p2", "Solve the solar heating benchmark");
  int p2_n = 50;
  double p2_eps = fips::Problem2Params{}.eps_u2;
  bool p2_no_periodicity = false;
  bool p2_timing = false;
  std::string p2_config, p2_output, p2_format = "csv";
  p2->add_option("--n", p2_n, "Grid size (even, >= 4)");
  p2->add_option("--eps", p2_eps, "Strict-positivity margin for the extraction rate");
  p2->add_flag("--no-periodicity", p2_no_periodicity, "Drop the zero-mean dynamics rows");
  p2->add_flag("--timing", p2_timing, "Include wall time in the report output");
  p2->add_option("--config", p2_config, "Solver config file (key=value lines)");
  p2->add_option("--output", p2_output, "Output file (default stdout)");
  p2->add_option("--format", p2_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  // validate
  auto* val = app.add_subcommand("validate", "Validate a benchmark problem definition");
  std::string val_problem = "p1";
  val->add_option("--problem", val_problem, "p1 or p2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (study->parsed()) {
      return run_quad_study(study_functions, study_n, study_threads, study_output, study_format);
    }
    if (dump->parsed()) {
      return run_fim_dump(dump_n, dump_T, dump_kind, dump_points, dump_output, dump_format);
    }
    if (p1->parsed()) {
      fips::Problem1Params params;
      params.b = p1_b;
      params.T = p1_T;
      const fips::DiscreteNlp nlp =
          fips::discretize(fips::make_problem1(params), p1_n, !p1_no_periodicity);
      const fips::SolveReport report = fips::solve(nlp, load_config(p1_config));
      return emit_solve_report(report, nlp.grid, p1_format, p1_output, p1_timing);
    }
    if (p2->parsed()) {
      fips::Problem2Params params;
      params.eps_u2 = p2_eps;
      const fips::DiscreteNlp nlp =
          fips::discretize(fips::make_problem2(params), p2_n, !p2_no_periodicity);
      const fips::SolveReport report = fips::solve(nlp, load_config(p2_config));
      return emit_solve_report(report, nlp.grid, p2_format, p2_output, p2_timing);
    }
    if (val->parsed()) {
      return run_validate(val_problem);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
