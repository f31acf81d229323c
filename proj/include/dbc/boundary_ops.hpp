#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "dbc/fem.hpp"

namespace dbc {

struct SolverSettings {
  SpdMethod method = SpdMethod::cholesky;
  /// Relative tolerance when method == jacobi_cg.
  double cg_tol = 1e-12;
};

/// Assembled P1 space on one mesh: matrices, interior/boundary blocks and
/// the reusable SPD solvers every boundary operator needs. The interior
/// stiffness and boundary mass solvers are built eagerly; Robin solvers
/// (A + weight * M_b on the boundary) on first use per weight. All members
/// are safe to call concurrently.
class FeSpace {
 public:
  explicit FeSpace(std::shared_ptr<const TriMesh> mesh, SolverSettings settings = {});
  explicit FeSpace(const TriMesh& mesh, SolverSettings settings = {});
  FeSpace(const FeSpace&) = delete;
  FeSpace& operator=(const FeSpace&) = delete;

  const TriMesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const TriMesh>& mesh_ptr() const { return mesh_; }
  const DofLayout& layout() const { return layout_; }
  const SolverSettings& settings() const { return settings_; }
  std::size_t n_nodes() const { return mesh_->n_nodes(); }
  std::size_t n_interior() const { return layout_.interior_nodes.size(); }
  std::size_t n_boundary() const { return layout_.boundary_nodes.size(); }

  const CsrMatrix& stiffness() const { return stiffness_; }
  const CsrMatrix& mass() const { return mass_; }
  const CsrMatrix& boundary_mass() const { return boundary_mass_; }
  /// A restricted to interior rows and boundary columns.
  const CsrMatrix& stiffness_ib() const { return stiffness_ib_; }

  /// x_I = A_II^{-1} rhs_I.
  Vector solve_interior(std::span<const double> rhs_interior) const;
  /// M_b^{-1} rhs.
  Vector solve_boundary_mass(std::span<const double> rhs) const;
  /// Solves (A + weight E M_b E^T) x = rhs on all nodes, E the boundary
  /// embedding. Its Schur complement on the boundary is N_h + weight M_b in
  /// functional form. weight > 0.
  Vector solve_robin(std::span<const double> rhs, double weight = 1.0) const;

  Vector gather_interior(std::span<const double> full) const;
  Vector gather_boundary(std::span<const double> full) const;
  /// Field with the given interior and boundary coefficients.
  FieldFunction combine(std::span<const double> interior, std::span<const double> boundary) const;

 private:
  std::shared_ptr<const TriMesh> mesh_;
  SolverSettings settings_;
  DofLayout layout_;
  CsrMatrix stiffness_;
  CsrMatrix mass_;
  CsrMatrix boundary_mass_;
  CsrMatrix stiffness_ib_;
  std::unique_ptr<SpdSolver> interior_solver_;
  std::unique_ptr<SpdSolver> boundary_mass_solver_;
  mutable std::mutex robin_mutex_;
  mutable std::map<double, std::shared_ptr<const SpdSolver>> robin_solvers_;
};

/// Q_h g: L2(Gamma) projection onto the trace space.
BoundaryFunction l2_projection(const FeSpace& space, const AnalyticFunction& g);
BoundaryFunction l2_projection(const FeSpace& space, const EdgeFunction& g);

/// Residual functional r_i = (grad y, grad phi_i) - load_i for boundary
/// nodes i; `load` holds (f, phi_j) for all nodes.
Vector normal_derivative_functional(const FeSpace& space, const FieldFunction& y, std::span<const double> load);

/// Variational normal derivative: d in the trace space with
/// (d, v)_Gamma = (grad y, grad v) - (f, v) for all P1 v.
BoundaryFunction normal_derivative(const FeSpace& space, const FieldFunction& y, const AnalyticFunction& f);
BoundaryFunction normal_derivative(const FeSpace& space, const FieldFunction& y, std::span<const double> load);

/// S_h z: discrete harmonic extension (trace z, zero interior residual).
FieldFunction harmonic_extension(const FeSpace& space, const BoundaryFunction& z);
/// E_h z: z on the boundary, zero at interior nodes.
FieldFunction zero_extension(const FeSpace& space, const BoundaryFunction& z);
/// I_h y + E_h (Q_h g - I_h g); its trace is Q_h g.
FieldFunction modified_interpolant(const FeSpace& space, const AnalyticFunction& y, const AnalyticFunction& g);

/// N_h z = normal derivative of S_h z.
BoundaryFunction steklov_poincare(const FeSpace& space, const BoundaryFunction& z);
/// <N_h z, phi_i> for boundary basis functions (Schur complement times z).
Vector steklov_poincare_functional(const FeSpace& space, const BoundaryFunction& z);

/// ||grad S_h z||_{L2}.
double h_half_seminorm(const FeSpace& space, const BoundaryFunction& z);
/// sqrt(<N_h z, z> + ||z||^2_{L2(Gamma)}).
double h_half_norm(const FeSpace& space, const BoundaryFunction& z);
/// Dual norm of h_half_norm, evaluated on the L2(Gamma) functional of v.
double h_minus_half_norm(const FeSpace& space, const BoundaryFunction& v);

}  // namespace dbc
