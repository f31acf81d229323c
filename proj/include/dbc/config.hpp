#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dbc/study.hpp"

namespace dbc {

enum class StudyKind { control, bvp };

struct SolverConfig {
  double gmres_tol = 1e-10;
  int restart = 50;
  int max_outer = 500;
  double cg_tol = 1e-12;
  /// "cholesky" or "cg".
  std::string linear = "cholesky";
};

/// Run configuration shared by solve-control and study. Rows are in
/// h-halvings: row r is the initial mesh after 2r bisection passes.
struct RunConfig {
  std::string domain;
  StudyKind kind = StudyKind::control;
  int coarsest_row = 3;
  int finest_row = 7;
  /// Single-solve row; solve-control falls back to finest_row.
  std::optional<int> level;
  int reference_offset = 2;
  /// Required for control runs.
  std::optional<double> nu;
  std::string f = "0";
  std::string u_d = "0";
  /// Exact solution of a boundary value study.
  std::string exact;
  SolverConfig solver;
  std::vector<std::string> metrics;
  int threads = 0;
};

/// Parses JSON config text. Unknown or mistyped fields throw ConfigError
/// naming the field; syntax errors report line and column.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Effective config with every default resolved, as JSON text.
std::string config_to_json(const RunConfig& config);

std::vector<std::string> preset_names();
/// Control studies on omega90 / omega135 / omega270 with nu = 1, f = 0, u_d = x + y.
RunConfig preset(const std::string& name);

ControlProblem make_control_problem(const RunConfig& config);
ControlOptions make_control_options(const RunConfig& config);
SolverSettings make_solver_settings(const RunConfig& config);
StudyOptions make_study_options(const RunConfig& config);
ControlStudySpec make_control_study(const RunConfig& config);
BvpStudySpec make_bvp_study(const RunConfig& config);

}  // namespace dbc
