// Discrete Dirichlet control with energy regularization.
//
// Sign convention: the adjoint p solves (grad p, grad v) = (u - u_d, v) for
// interior test functions. With the variational normal derivative
// d(y; w) defined by (d, v)_Gamma = (grad y, grad v) - (w, v), the true
// adjoint of S_h is S_h' w = -d(P_h w; w), since (grad P_h w, grad S_h v) = 0.
// The gradient equation therefore reads nu N_h z - d(p; u - u_d) = 0, and the
// reduced operator S_h' S_h + nu N_h is symmetric positive definite.

#include "dbc/control.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dbc/error.hpp"

namespace dbc {

double OptimalityResiduals::max() const { return std::max({state, adjoint, gradient, trace_mismatch}); }

FieldFunction zero_trace_solve(const FeSpace& space, std::span<const double> load) {
  if (load.size() != space.n_nodes()) throw InvalidInput("zero-trace solve: load does not match the mesh");
  const Vector interior = space.solve_interior(space.gather_interior(load));
  return space.combine(interior, Vector(space.n_boundary(), 0.0));
}

FieldFunction solve_Pf(const FeSpace& space, const AnalyticFunction& f) {
  return zero_trace_solve(space, load_vector(space.mesh(), f));
}

Vector adjoint_functional(const FeSpace& space, std::span<const double> load) {
  const FieldFunction p = zero_trace_solve(space, load);
  Vector r = normal_derivative_functional(space, p, load);
  for (double& v : r) v = -v;
  return r;
}

Vector apply_Tnu_functional(const FeSpace& space, double nu, const BoundaryFunction& z) {
  // S_h and N_h act exactly on constants, so only the fluctuation of z goes through the solves;
  // this keeps nu * N_h z accurate when nu is large.
  double mean = 0.0;
  for (double v : z.values) mean += v;
  if (!z.values.empty()) mean /= static_cast<double>(z.values.size());
  BoundaryFunction fluct = z;
  for (double& v : fluct.values) v -= mean;
  FieldFunction u = harmonic_extension(space, fluct);
  const Vector zero(space.n_nodes(), 0.0);
  Vector t = normal_derivative_functional(space, u, zero);
  for (double& v : u.values) v += mean;
  const Vector tracking = adjoint_functional(space, space.mass().multiply(u.values));
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = nu * t[k] + tracking[k];
  return t;
}

BoundaryFunction apply_Tnu(const FeSpace& space, double nu, const BoundaryFunction& z) {
  return {space.solve_boundary_mass(apply_Tnu_functional(space, nu, z))};
}

Vector rhs_gh_functional(const FeSpace& space, const AnalyticFunction& f, const AnalyticFunction& u_d) {
  const FieldFunction u_f = solve_Pf(space, f);
  Vector load = load_vector(space.mesh(), u_d);
  const Vector mu = space.mass().multiply(u_f.values);
  for (std::size_t i = 0; i < load.size(); ++i) load[i] -= mu[i];
  return adjoint_functional(space, load);
}

BoundaryFunction rhs_gh(const FeSpace& space, const AnalyticFunction& f, const AnalyticFunction& u_d) {
  return {space.solve_boundary_mass(rhs_gh_functional(space, f, u_d))};
}

double objective_value(const FeSpace& space, double nu, const FieldFunction& u, const BoundaryFunction& z,
                       const AnalyticFunction& u_d) {
  const TriMesh& mesh = space.mesh();
  if (u.values.size() != mesh.n_nodes()) throw InvalidInput("objective: state does not match the mesh");
  double tracking = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles()[t];
    double local = 0.0;
    for (int k = 0; k < 3; ++k) {
      const int i = tri[static_cast<std::size_t>((k + 1) % 3)];
      const int j = tri[static_cast<std::size_t>((k + 2) % 3)];
      const double uh = 0.5 * (u.values[static_cast<std::size_t>(i)] + u.values[static_cast<std::size_t>(j)]);
      const double e = uh - u_d(midpoint(mesh.node(i), mesh.node(j)));
      local += e * e;
    }
    tracking += mesh.triangle_area(t) / 3.0 * local;
  }
  const double energy = h_half_seminorm(space, z);
  return 0.5 * tracking + 0.5 * nu * energy * energy;
}

ControlSolution solve_control(const ControlProblem& problem, const FeSpace& space, const ControlOptions& options) {
  if (!(problem.nu > 0.0) || !std::isfinite(problem.nu)) throw InvalidInput("regularization nu must be positive");
  const double nu = problem.nu;
  const std::size_t nb = space.n_boundary();

  const Vector rhs = rhs_gh_functional(space, problem.f, problem.u_d);
  const LinearOperator reduced{nb, [&](std::span<const double> x, std::span<double> y) {
                                 const BoundaryFunction z{Vector(x.begin(), x.end())};
                                 const Vector t = apply_Tnu_functional(space, nu, z);
                                 std::copy(t.begin(), t.end(), y.begin());
                               }};
  // (nu N + M_b)^{-1} = nu^{-1} (N + M_b / nu)^{-1}.
  const LinearOperator robin{nb, [&](std::span<const double> x, std::span<double> y) {
                               Vector full(space.n_nodes(), 0.0);
                               const auto& bnodes = space.layout().boundary_nodes;
                               for (std::size_t k = 0; k < nb; ++k) full[static_cast<std::size_t>(bnodes[k])] = x[k];
                               const Vector sol = space.solve_robin(full, 1.0 / nu);
                               for (std::size_t k = 0; k < nb; ++k) y[k] = sol[static_cast<std::size_t>(bnodes[k])] / nu;
                             }};
  const LinearOperator* precond = options.preconditioner == ReducedPreconditioner::robin ? &robin : nullptr;
  // Galerkin step on the constants first: N_h 1 = 0, so the constant part of z is fixed by the
  // tracking term alone, and GMRES only resolves the O(1/nu) fluctuation around it.
  const Vector ones(nb, 1.0);
  const Vector t_ones = apply_Tnu_functional(space, nu, BoundaryFunction{ones});
  const double t_ones_sum = std::accumulate(t_ones.begin(), t_ones.end(), 0.0);
  const double c0 = t_ones_sum > 0.0 ? std::accumulate(rhs.begin(), rhs.end(), 0.0) / t_ones_sum : 0.0;
  Vector deflated = rhs;
  for (std::size_t k = 0; k < nb; ++k) deflated[k] -= c0 * t_ones[k];
  const double rhs_norm = std::sqrt(std::inner_product(rhs.begin(), rhs.end(), rhs.begin(), 0.0));
  const double deflated_norm = std::sqrt(std::inner_product(deflated.begin(), deflated.end(), deflated.begin(), 0.0));
  GmresOptions gopt = options.gmres;
  if (deflated_norm > 0.0) gopt.rel_tol = options.gmres.rel_tol * rhs_norm / deflated_norm;
  SolveReport rep = gmres(reduced, deflated, gopt, precond);
  if (deflated_norm > 0.0) rep.rel_residual *= deflated_norm / rhs_norm;
  for (double& v : rep.x) v += c0;
  if (!rep.converged) {
    throw SolverFailure("GMRES on the reduced control system did not converge: relative residual " +
                            std::to_string(rep.rel_residual) + " after " + std::to_string(rep.iterations) +
                            " iterations",
                        rep.rel_residual, rep.iterations);
  }

  ControlSolution sol;
  sol.z = BoundaryFunction{std::move(rep.x)};
  sol.gmres_iterations = rep.iterations;
  sol.gmres_residual = rep.rel_residual;

  const double z_mean = nb == 0 ? 0.0 : std::accumulate(sol.z.values.begin(), sol.z.values.end(), 0.0) / static_cast<double>(nb);
  BoundaryFunction z_fluct = sol.z;
  for (double& v : z_fluct.values) v -= z_mean;
  FieldFunction sz = harmonic_extension(space, z_fluct);
  for (double& v : sz.values) v += z_mean;
  const auto& bnodes = space.layout().boundary_nodes;
  for (std::size_t k = 0; k < nb; ++k) sz.values[static_cast<std::size_t>(bnodes[k])] = sol.z.values[k];
  const FieldFunction u_f = solve_Pf(space, problem.f);
  sol.u.values.resize(space.n_nodes());
  for (std::size_t i = 0; i < space.n_nodes(); ++i) sol.u.values[i] = sz.values[i] + u_f.values[i];
  // Boundary values of u_f are exact zeros, so the trace of u is exactly z.
  Vector adjoint_load = space.mass().multiply(sol.u.values);
  const Vector ud_load = load_vector(space.mesh(), problem.u_d);
  for (std::size_t i = 0; i < adjoint_load.size(); ++i) adjoint_load[i] -= ud_load[i];
  sol.p = zero_trace_solve(space, adjoint_load);
  sol.objective = objective_value(space, nu, sol.u, sol.z, problem.u_d);
  return sol;
}

ControlSolution solve_control(const ControlProblem& problem, const TriMesh& mesh, const ControlOptions& options,
                              SolverSettings settings) {
  const FeSpace space(mesh, settings);
  return solve_control(problem, space, options);
}

namespace {

// Row-wise |A| |x|, the magnitude against which the rounding in A x is measured.
Vector abs_product(const CsrMatrix& a, std::span<const double> x) {
  Vector out(a.rows(), 0.0);
  const auto off = a.row_offsets();
  const auto col = a.col_indices();
  const auto val = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (auto k = off[r]; k < off[r + 1]; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      out[r] += std::abs(val[kk] * x[static_cast<std::size_t>(col[kk])]);
    }
  }
  return out;
}

}  // namespace

OptimalityResiduals optimality_residuals(const FeSpace& space, const ControlProblem& problem,
                                         const ControlSolution& solution) {
  const auto& layout = space.layout();
  auto max_abs = [](std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  OptimalityResiduals res;

  const Vector f_load = load_vector(space.mesh(), problem.f);
  const Vector au = space.stiffness().multiply(solution.u.values);
  Vector state_res(space.n_interior());
  for (std::size_t k = 0; k < state_res.size(); ++k) {
    const auto i = static_cast<std::size_t>(layout.interior_nodes[k]);
    state_res[k] = au[i] - f_load[i];
  }
  const double state_scale =
      std::max({max_abs(f_load), max_abs(abs_product(space.stiffness(), solution.u.values)), 1e-300});
  res.state = max_abs(state_res) / state_scale;

  Vector p_load = space.mass().multiply(solution.u.values);
  const Vector ud_load = load_vector(space.mesh(), problem.u_d);
  for (std::size_t i = 0; i < p_load.size(); ++i) p_load[i] -= ud_load[i];
  const Vector ap = space.stiffness().multiply(solution.p.values);
  Vector adj_res(space.n_interior());
  for (std::size_t k = 0; k < adj_res.size(); ++k) {
    const auto i = static_cast<std::size_t>(layout.interior_nodes[k]);
    adj_res[k] = ap[i] - p_load[i];
  }
  const double adj_scale =
      std::max({max_abs(p_load), max_abs(abs_product(space.stiffness(), solution.p.values)), 1e-300});
  res.adjoint = max_abs(adj_res) / adj_scale;

  BoundaryFunction fluct = solution.z;
  if (!fluct.values.empty()) {
    const double mean = std::accumulate(fluct.values.begin(), fluct.values.end(), 0.0) /
                        static_cast<double>(fluct.values.size());
    for (double& v : fluct.values) v -= mean;
  }
  const BoundaryFunction nz = steklov_poincare(space, fluct);
  const BoundaryFunction dp = normal_derivative(space, solution.p, p_load);
  BoundaryFunction grad{Vector(space.n_boundary())};
  BoundaryFunction nu_nz{Vector(space.n_boundary())};
  for (std::size_t k = 0; k < grad.values.size(); ++k) {
    nu_nz.values[k] = problem.nu * nz.values[k];
    grad.values[k] = nu_nz.values[k] - dp.values[k];
  }
  const double grad_scale = std::max({boundary_l2_norm(space.boundary_mass(), nu_nz),
                                      boundary_l2_norm(space.boundary_mass(), dp), 1e-300});
  res.gradient = boundary_l2_norm(space.boundary_mass(), grad) / grad_scale;

  double mismatch = 0.0;
  for (std::size_t k = 0; k < layout.boundary_nodes.size(); ++k) {
    const auto i = static_cast<std::size_t>(layout.boundary_nodes[k]);
    mismatch = std::max({mismatch, std::abs(solution.u.values[i] - solution.z.values[k]), std::abs(solution.p.values[i])});
  }
  res.trace_mismatch = mismatch;
  return res;
}

}  // namespace dbc
