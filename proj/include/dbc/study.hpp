#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dbc/control.hpp"

namespace dbc {

/// Bisection passes of a reported row; each row halves h.
constexpr int passes_for_row(int row) { return 2 * row; }

/// Nested meshes of one builtin domain, passes 0..max_passes, built
/// sequentially from the initial mesh.
class MeshHierarchy {
 public:
  MeshHierarchy(const std::string& domain, int max_passes);
  std::size_t size() const { return meshes_.size(); }
  const std::shared_ptr<const TriMesh>& at_passes(int passes) const;
  const std::shared_ptr<const TriMesh>& at_row(int row) const { return at_passes(passes_for_row(row)); }

 private:
  std::vector<std::shared_ptr<const TriMesh>> meshes_;
};

/// EOC_k = log2(e_k / e_{k+1}); one entry per consecutive pair. Entries with
/// an error <= noise_floor (or nonpositive) are NaN.
std::vector<double> compute_eoc(const std::vector<double>& errors, double noise_floor = 0.0);

struct ConvergenceRow {
  int row = 0;
  double h_sqrt2 = 0.0;
  std::size_t n_interior = 0;
  std::size_t n_boundary = 0;
  std::vector<double> errors;
  /// NaN where undefined (first row, vanishing errors).
  std::vector<double> eoc;
  int gmres_iterations = 0;
};

struct ConvergenceTable {
  std::string title;
  std::vector<std::string> metrics;
  std::vector<ConvergenceRow> rows;
  /// Predicted rate per metric.
  std::vector<double> theory;
  int reference_row = 0;

  std::string to_csv() const;
  std::string to_markdown() const;
  /// Index of a metric column; throws InvalidInput when absent.
  std::size_t metric_index(const std::string& name) const;
};

/// Metric names of the control study: |u - u_h|_H1, ||z - z_h||_L2(Gamma), |z - z_h|_H1/2.
std::vector<std::string> control_metric_names();
/// Metric names of the boundary value study: discrete H^-1/2 error of the
/// normal derivative, L2 and H1 state errors, and h^1/2 ||dn y - Q_h dn y||.
std::vector<std::string> bvp_metric_names();

struct StudyOptions {
  int coarsest_row = 3;
  int finest_row = 7;
  /// Rows between the finest reported row and the reference mesh (control study).
  int reference_offset = 2;
  /// Subset of the metric names; empty means all.
  std::vector<std::string> metrics;
  SolverSettings settings{};
  /// Upper bound on concurrent level solves; 0 reads DBC_THREADS, else hardware.
  int threads = 0;
};

struct ControlStudySpec {
  std::string domain;
  ControlProblem problem;
  ControlOptions control{};
  StudyOptions study{};
};

struct BvpStudySpec {
  std::string domain;
  /// Exact solution with gradient; its trace is the Dirichlet data.
  AnalyticFunction exact;
  AnalyticFunction f = AnalyticFunction::zero();
  StudyOptions study{};
};

ConvergenceTable run_control_study(const ControlStudySpec& spec);
ConvergenceTable run_bvp_study(const BvpStudySpec& spec);

/// Worker count for level-parallel loops: explicit request, else DBC_THREADS, else hardware.
int study_thread_count(int requested, std::size_t tasks);

}  // namespace dbc
