#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dbc/geometry.hpp"

namespace dbc {

using Triangle = std::array<int, 3>;

/// Unordered node pair, stored with a < b.
struct NodePair {
  int a = -1;
  int b = -1;
  friend bool operator==(NodePair, NodePair) = default;
};

/// Boundary edge oriented counterclockwise along the polygon; `tag` is the
/// index of the polygon edge it lies on.
struct BoundaryEdge {
  int a = -1;
  int b = -1;
  int tag = -1;
  friend bool operator==(BoundaryEdge, BoundaryEdge) = default;
};

/// Conforming P1 triangulation of a polygonal domain. Immutable; refinement
/// returns a new mesh that keeps the node numbering of its parent and
/// appends the new midpoint nodes.
class TriMesh {
 public:
  /// Validates orientation, conformity and boundary consistency.
  /// `parents[i]` is the bisected edge for refined nodes, {-1,-1} otherwise.
  TriMesh(std::shared_ptr<const PolygonalDomain> domain, std::vector<Point> nodes, std::vector<Triangle> triangles,
          std::vector<BoundaryEdge> boundary_edges, std::vector<NodePair> parents, std::uint64_t lineage, int passes);

  const PolygonalDomain& domain() const { return *domain_; }
  const std::shared_ptr<const PolygonalDomain>& domain_ptr() const { return domain_; }

  std::span<const Point> nodes() const { return nodes_; }
  Point node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  std::span<const Triangle> triangles() const { return triangles_; }
  std::span<const BoundaryEdge> boundary_edges() const { return boundary_edges_; }
  std::span<const NodePair> parents() const { return parents_; }
  std::optional<NodePair> parent(int i) const;

  std::size_t n_nodes() const { return nodes_.size(); }
  std::size_t n_triangles() const { return triangles_.size(); }
  std::size_t n_boundary_nodes() const { return boundary_nodes_.size(); }
  std::size_t n_interior_nodes() const { return nodes_.size() - boundary_nodes_.size(); }

  bool is_boundary(int i) const { return boundary_flag_[static_cast<std::size_t>(i)] != 0; }
  /// Boundary nodes counterclockwise, starting at polygon vertex 0.
  std::span<const int> boundary_nodes() const { return boundary_nodes_; }
  /// Polygon vertex index if node i coincides with a corner.
  std::optional<std::size_t> corner_of(int i) const;

  /// Identifies the initial mesh this one was refined from.
  std::uint64_t lineage() const { return lineage_; }
  /// Number of bisection passes since the initial mesh.
  int passes() const { return passes_; }

  double triangle_area(std::size_t t) const;
  /// Maximal element diameter.
  double h() const;
  /// Smallest interior angle over all triangles, radians.
  double min_angle() const;

 private:
  std::shared_ptr<const PolygonalDomain> domain_;
  std::vector<Point> nodes_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<NodePair> parents_;
  std::vector<char> boundary_flag_;
  std::vector<int> boundary_nodes_;
  std::uint64_t lineage_;
  int passes_;
};

/// Structured starting meshes: 2, 3 and 6 right isosceles triangles for
/// omega90, omega135 and omega270. Other domains are rejected.
TriMesh initial_mesh(const PolygonalDomain& domain);

/// Ear-clipping triangulation of an arbitrary simple polygon.
TriMesh triangulate_custom(const PolygonalDomain& domain);

/// One uniform pass: every triangle is bisected through the midpoint of its
/// longest edge, with recursive closure to keep the mesh conforming.
TriMesh bisect_refine(const TriMesh& mesh);

/// Applies `passes` uniform passes.
TriMesh refine_uniform(const TriMesh& mesh, int passes);

inline double mesh_size(const TriMesh& mesh) { return mesh.h(); }

/// True if `fine` is `coarse` or one of its refinements.
bool is_nested(const TriMesh& coarse, const TriMesh& fine);

/// Exact P1 embedding of nodal values from `coarse` into `fine`. Throws
/// InvalidInput if the meshes are not nested.
std::vector<double> prolongate(std::span<const double> coarse_values, const TriMesh& coarse, const TriMesh& fine);

/// Line-oriented text format; coordinates written with 17 significant digits.
void write_mesh(std::ostream& out, const TriMesh& mesh);
TriMesh read_mesh(std::istream& in);

}  // namespace dbc
