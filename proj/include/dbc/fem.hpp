#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dbc/mesh.hpp"
#include "dbc/sparse.hpp"

namespace dbc {

/// Pointwise function on the closed domain, with an optional gradient.
struct AnalyticFunction {
  std::function<double(Point)> value;
  std::function<Point(Point)> gradient;

  double operator()(Point p) const { return value(p); }
  bool has_gradient() const { return static_cast<bool>(gradient); }

  static AnalyticFunction constant(double c);
  static AnalyticFunction zero() { return constant(0.0); }
};

/// Boundary data that may depend on the polygon edge (e.g. a normal
/// derivative, discontinuous at corners). `tag` is the polygon edge index.
using EdgeFunction = std::function<double(Point, int tag)>;

/// P1 function: one coefficient per mesh node.
struct FieldFunction {
  Vector values;
};

/// Trace-space function: one coefficient per boundary node, in the order of
/// TriMesh::boundary_nodes().
struct BoundaryFunction {
  Vector values;
};

/// Interior/boundary numbering of the mesh nodes.
struct DofLayout {
  std::vector<int> interior_nodes;
  std::vector<int> boundary_nodes;
  /// Position in boundary_nodes, -1 for interior nodes.
  std::vector<int> boundary_slot;
  /// Position in interior_nodes, -1 for boundary nodes.
  std::vector<int> interior_slot;

  explicit DofLayout(const TriMesh& mesh);
};

/// A_ij = (grad phi_i, grad phi_j); exact. Throws InvalidInput on zero-area elements.
CsrMatrix assemble_stiffness(const TriMesh& mesh);
/// M_ij = (phi_i, phi_j); exact.
CsrMatrix assemble_mass(const TriMesh& mesh);
/// Boundary mass matrix over the closed polyline, in boundary-node order.
CsrMatrix assemble_boundary_mass(const TriMesh& mesh);

/// b_i = (f, phi_i) with the three-point edge-midpoint rule (degree 2).
Vector load_vector(const TriMesh& mesh, const AnalyticFunction& f);
/// b_i = (g, phi_i)_{L2(Gamma)} over boundary nodes, two-point Gauss per edge.
Vector boundary_load_vector(const TriMesh& mesh, const AnalyticFunction& g);
Vector boundary_load_vector(const TriMesh& mesh, const EdgeFunction& g);

FieldFunction nodal_interpolant(const TriMesh& mesh, const AnalyticFunction& v);
BoundaryFunction nodal_trace_interpolant(const TriMesh& mesh, const AnalyticFunction& v);
BoundaryFunction trace(const TriMesh& mesh, const FieldFunction& u);

/// sqrt(u^T A u), sqrt(u^T M u), sqrt(z^T M_b z).
double h1_seminorm(const CsrMatrix& stiffness, const FieldFunction& u);
double l2_norm(const CsrMatrix& mass, const FieldFunction& u);
double boundary_l2_norm(const CsrMatrix& boundary_mass, const BoundaryFunction& z);

/// ||v - u_h||_{L2} and |v - u_h|_{H1} by a degree-5 rule per triangle.
double l2_error(const TriMesh& mesh, const FieldFunction& u, const AnalyticFunction& v);
double h1_error(const TriMesh& mesh, const FieldFunction& u, const AnalyticFunction& v);
/// ||g - z_h||_{L2(Gamma)} with five-point Gauss per boundary edge.
double boundary_l2_error(const TriMesh& mesh, const BoundaryFunction& z, const EdgeFunction& g);

}  // namespace dbc
