#include "dbc/boundary_ops.hpp"

#include <cmath>

#include "dbc/error.hpp"

namespace dbc {

FeSpace::FeSpace(const TriMesh& mesh, SolverSettings settings)
    : FeSpace(std::make_shared<const TriMesh>(mesh), settings) {}

FeSpace::FeSpace(std::shared_ptr<const TriMesh> mesh, SolverSettings settings)
    : mesh_(std::move(mesh)),
      settings_(settings),
      layout_(*mesh_),
      stiffness_(assemble_stiffness(*mesh_)),
      mass_(assemble_mass(*mesh_)),
      boundary_mass_(assemble_boundary_mass(*mesh_)) {
  stiffness_ib_ = stiffness_.submatrix(layout_.interior_nodes, layout_.boundary_nodes);
  interior_solver_ =
      make_spd_solver(stiffness_.submatrix(layout_.interior_nodes, layout_.interior_nodes), settings_.method,
                      settings_.cg_tol);
  boundary_mass_solver_ = make_spd_solver(boundary_mass_, settings_.method, settings_.cg_tol);
}

Vector FeSpace::solve_interior(std::span<const double> rhs_interior) const {
  if (rhs_interior.size() != n_interior()) throw InvalidInput("interior solve: dimension mismatch");
  if (n_interior() == 0) return {};
  return interior_solver_->solve(rhs_interior);
}

Vector FeSpace::solve_boundary_mass(std::span<const double> rhs) const {
  if (rhs.size() != n_boundary()) throw InvalidInput("boundary mass solve: dimension mismatch");
  return boundary_mass_solver_->solve(rhs);
}

Vector FeSpace::solve_robin(std::span<const double> rhs, double weight) const {
  if (rhs.size() != n_nodes()) throw InvalidInput("Robin solve: dimension mismatch");
  if (!(weight > 0.0) || !std::isfinite(weight)) throw InvalidInput("Robin solve: weight must be positive");
  std::shared_ptr<const SpdSolver> solver;
  {
    // Factorizations are few (one per weight) and large; build under the lock.
    std::lock_guard lock(robin_mutex_);
    auto& slot = robin_solvers_[weight];
    if (!slot) {
      std::vector<Triplet> triplets;
      triplets.reserve(stiffness_.nnz() + boundary_mass_.nnz());
      for (std::size_t r = 0; r < stiffness_.rows(); ++r) {
        for (auto k = stiffness_.row_offsets()[r]; k < stiffness_.row_offsets()[r + 1]; ++k) {
          triplets.push_back({static_cast<int>(r), stiffness_.col_indices()[static_cast<std::size_t>(k)],
                              stiffness_.values()[static_cast<std::size_t>(k)]});
        }
      }
      for (std::size_t r = 0; r < boundary_mass_.rows(); ++r) {
        for (auto k = boundary_mass_.row_offsets()[r]; k < boundary_mass_.row_offsets()[r + 1]; ++k) {
          const auto c = static_cast<std::size_t>(boundary_mass_.col_indices()[static_cast<std::size_t>(k)]);
          triplets.push_back({layout_.boundary_nodes[r], layout_.boundary_nodes[c],
                              weight * boundary_mass_.values()[static_cast<std::size_t>(k)]});
        }
      }
      slot = make_spd_solver(assemble_from_triplets(n_nodes(), n_nodes(), triplets), settings_.method,
                             settings_.cg_tol);
    }
    solver = slot;
  }
  return solver->solve(rhs);
}

Vector FeSpace::gather_interior(std::span<const double> full) const {
  if (full.size() != n_nodes()) throw InvalidInput("gather: field does not match mesh");
  Vector out(n_interior());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = full[static_cast<std::size_t>(layout_.interior_nodes[k])];
  return out;
}

Vector FeSpace::gather_boundary(std::span<const double> full) const {
  if (full.size() != n_nodes()) throw InvalidInput("gather: field does not match mesh");
  Vector out(n_boundary());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = full[static_cast<std::size_t>(layout_.boundary_nodes[k])];
  return out;
}

FieldFunction FeSpace::combine(std::span<const double> interior, std::span<const double> boundary) const {
  if (interior.size() != n_interior() || boundary.size() != n_boundary()) {
    throw InvalidInput("combine: coefficient counts do not match the space");
  }
  FieldFunction u{Vector(n_nodes())};
  for (std::size_t k = 0; k < interior.size(); ++k) u.values[static_cast<std::size_t>(layout_.interior_nodes[k])] = interior[k];
  for (std::size_t k = 0; k < boundary.size(); ++k) u.values[static_cast<std::size_t>(layout_.boundary_nodes[k])] = boundary[k];
  return u;
}

namespace {

void check_boundary(const FeSpace& space, const BoundaryFunction& z) {
  if (z.values.size() != space.n_boundary()) throw InvalidInput("boundary function does not match the mesh");
}

void check_field(const FeSpace& space, const FieldFunction& u) {
  if (u.values.size() != space.n_nodes()) throw InvalidInput("field function does not match the mesh");
}

}  // namespace

BoundaryFunction l2_projection(const FeSpace& space, const EdgeFunction& g) {
  return {space.solve_boundary_mass(boundary_load_vector(space.mesh(), g))};
}

BoundaryFunction l2_projection(const FeSpace& space, const AnalyticFunction& g) {
  return {space.solve_boundary_mass(boundary_load_vector(space.mesh(), g))};
}

Vector normal_derivative_functional(const FeSpace& space, const FieldFunction& y, std::span<const double> load) {
  check_field(space, y);
  if (load.size() != space.n_nodes()) throw InvalidInput("normal derivative: load vector does not match the mesh");
  const Vector ay = space.stiffness().multiply(y.values);
  Vector r(space.n_boundary());
  for (std::size_t k = 0; k < r.size(); ++k) {
    const auto i = static_cast<std::size_t>(space.layout().boundary_nodes[k]);
    r[k] = ay[i] - load[i];
  }
  return r;
}

BoundaryFunction normal_derivative(const FeSpace& space, const FieldFunction& y, std::span<const double> load) {
  return {space.solve_boundary_mass(normal_derivative_functional(space, y, load))};
}

BoundaryFunction normal_derivative(const FeSpace& space, const FieldFunction& y, const AnalyticFunction& f) {
  return normal_derivative(space, y, load_vector(space.mesh(), f));
}

FieldFunction harmonic_extension(const FeSpace& space, const BoundaryFunction& z) {
  check_boundary(space, z);
  Vector rhs = space.stiffness_ib().multiply(z.values);
  for (double& v : rhs) v = -v;
  const Vector interior = space.solve_interior(rhs);
  return space.combine(interior, z.values);
}

FieldFunction zero_extension(const FeSpace& space, const BoundaryFunction& z) {
  check_boundary(space, z);
  return space.combine(Vector(space.n_interior(), 0.0), z.values);
}

FieldFunction modified_interpolant(const FeSpace& space, const AnalyticFunction& y, const AnalyticFunction& g) {
  FieldFunction u = nodal_interpolant(space.mesh(), y);
  const BoundaryFunction qg = l2_projection(space, g);
  // I_h y + E_h(Q_h g - I_h g): boundary coefficients become exactly Q_h g.
  const auto& bnodes = space.layout().boundary_nodes;
  for (std::size_t k = 0; k < bnodes.size(); ++k) {
    const auto i = static_cast<std::size_t>(bnodes[k]);
    u.values[i] = qg.values[k];
  }
  return u;
}

Vector steklov_poincare_functional(const FeSpace& space, const BoundaryFunction& z) {
  const FieldFunction u = harmonic_extension(space, z);
  return normal_derivative_functional(space, u, Vector(space.n_nodes(), 0.0));
}

BoundaryFunction steklov_poincare(const FeSpace& space, const BoundaryFunction& z) {
  return {space.solve_boundary_mass(steklov_poincare_functional(space, z))};
}

double h_half_seminorm(const FeSpace& space, const BoundaryFunction& z) {
  return h1_seminorm(space.stiffness(), harmonic_extension(space, z));
}

double h_half_norm(const FeSpace& space, const BoundaryFunction& z) {
  const double semi = h_half_seminorm(space, z);
  const double l2 = boundary_l2_norm(space.boundary_mass(), z);
  return std::sqrt(semi * semi + l2 * l2);
}

double h_minus_half_norm(const FeSpace& space, const BoundaryFunction& v) {
  check_boundary(space, v);
  const Vector functional = space.boundary_mass().multiply(v.values);
  Vector rhs(space.n_nodes(), 0.0);
  const auto& bnodes = space.layout().boundary_nodes;
  for (std::size_t k = 0; k < bnodes.size(); ++k) rhs[static_cast<std::size_t>(bnodes[k])] = functional[k];
  const Vector x = space.solve_robin(rhs);
  const Vector w = space.gather_boundary(x);
  return std::sqrt(std::max(0.0, kernels::dot(functional, w)));
}

}  // namespace dbc
