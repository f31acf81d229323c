#pragma once

#include "dbc/boundary_ops.hpp"

namespace dbc {

/// min 1/2 ||u - u_d||^2 + nu/2 <N z, z>  subject to  -Laplace u = f, u = z on the boundary.
struct ControlProblem {
  double nu = 1.0;
  AnalyticFunction f = AnalyticFunction::zero();
  AnalyticFunction u_d = AnalyticFunction::zero();
};

enum class ReducedPreconditioner {
  none,
  /// (nu N_h + M_b)^{-1}, applied with one Robin solve on the full mesh.
  robin,
};

struct ControlOptions {
  GmresOptions gmres{};
  ReducedPreconditioner preconditioner = ReducedPreconditioner::robin;
};

struct ControlSolution {
  BoundaryFunction z;
  FieldFunction u;
  /// Adjoint state; its boundary coefficients are zero.
  FieldFunction p;
  double objective = 0.0;
  int gmres_iterations = 0;
  double gmres_residual = 0.0;
};

/// Residuals of the discrete optimality system, each relative to its data scale.
struct OptimalityResiduals {
  /// max |(A u - (f, .))_I| / scale.
  double state = 0.0;
  /// max |(A p - (u - u_d, .))_I| / scale.
  double adjoint = 0.0;
  /// || nu N_h z - normal derivative of p ||_{M_b} / scale.
  double gradient = 0.0;
  /// max |u_B - z| and max |p_B|; exact zeros for a valid solution.
  double trace_mismatch = 0.0;

  double max() const;
};

/// Zero-trace solve with a load functional over all nodes: interior rows of
/// A u = load, u = 0 on the boundary.
FieldFunction zero_trace_solve(const FeSpace& space, std::span<const double> load);

/// P_h f.
FieldFunction solve_Pf(const FeSpace& space, const AnalyticFunction& f);

/// Adjoint of S_h as a functional over boundary basis functions: for a load
/// functional w (w_j = (w, phi_j)) returns (w, S_h phi_i)_{L2}. Equals minus
/// the variational normal derivative of the zero-trace solve with load w.
Vector adjoint_functional(const FeSpace& space, std::span<const double> load);

/// <T_nu z, phi_i> for boundary basis functions, T_nu = S_h' S_h + nu N_h.
Vector apply_Tnu_functional(const FeSpace& space, double nu, const BoundaryFunction& z);
/// Riesz coefficients of T_nu z in the trace space (M_b^{-1} of the functional).
BoundaryFunction apply_Tnu(const FeSpace& space, double nu, const BoundaryFunction& z);

/// <g_h, phi_i> with g_h = S_h'(u_d - P_h f).
Vector rhs_gh_functional(const FeSpace& space, const AnalyticFunction& f, const AnalyticFunction& u_d);
BoundaryFunction rhs_gh(const FeSpace& space, const AnalyticFunction& f, const AnalyticFunction& u_d);

/// Reduced-system GMRES solve and reconstruction of (z, u, p). Throws
/// SolverFailure if GMRES misses its tolerance.
ControlSolution solve_control(const ControlProblem& problem, const FeSpace& space, const ControlOptions& options = {});
ControlSolution solve_control(const ControlProblem& problem, const TriMesh& mesh, const ControlOptions& options = {},
                              SolverSettings settings = {});

/// J_h = 1/2 ||u_h - u_d||^2 + nu/2 <N_h z, z>; the tracking term uses the
/// edge-midpoint rule (exact for polynomial u_d of degree <= 1).
double objective_value(const FeSpace& space, double nu, const FieldFunction& u, const BoundaryFunction& z,
                       const AnalyticFunction& u_d);

OptimalityResiduals optimality_residuals(const FeSpace& space, const ControlProblem& problem,
                                         const ControlSolution& solution);

}  // namespace dbc
