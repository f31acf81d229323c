// Longest-edge bisection with conforming closure.
//
// Each triangle's refinement edge is its longest edge (ties: the edge whose
// opposite vertex has the smallest node index). An edge is split if it is the
// refinement edge of a marked triangle; closure then marks the refinement edge
// of every triangle that has some split edge, until stable. A triangle with
// split edges is bisected at its refinement edge first, and each child is
// bisected again at the parent edge it inherited if that edge is split, so a
// triangle produces 2, 3 or 4 children.

#include <algorithm>

#include "dbc/mesh.hpp"
#include "mesh_internal.hpp"

namespace dbc {

namespace {

int refinement_edge(const TriMesh& mesh, const Triangle& tri) {
  double len2[3];
  for (int k = 0; k < 3; ++k) {
    const Point d = mesh.node(tri[static_cast<std::size_t>((k + 2) % 3)]) - mesh.node(tri[static_cast<std::size_t>((k + 1) % 3)]);
    len2[k] = dot(d, d);
  }
  const double longest = std::max({len2[0], len2[1], len2[2]});
  int best = -1;
  for (int k = 0; k < 3; ++k) {
    if (len2[k] < longest * (1.0 - 1e-12)) continue;
    if (best < 0 || tri[static_cast<std::size_t>(k)] < tri[static_cast<std::size_t>(best)]) best = k;
  }
  return best;
}

TriMesh refine_marked(const TriMesh& mesh, const std::vector<char>& marked_triangles) {
  const auto triangles = mesh.triangles();
  const std::size_t nt = triangles.size();
  const detail::EdgeTable table = detail::build_edge_table(triangles);

  std::vector<int> ref_local(nt);
  for (std::size_t t = 0; t < nt; ++t) ref_local[t] = refinement_edge(mesh, triangles[t]);
  auto edge_of = [&](std::size_t t, int k) {
    return static_cast<std::size_t>(table.local_to_edge[3 * t + static_cast<std::size_t>(k)]);
  };

  std::vector<char> split(table.edges.size(), 0);
  for (std::size_t t = 0; t < nt; ++t) {
    if (marked_triangles[t]) split[edge_of(t, ref_local[t])] = 1;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t t = 0; t < nt; ++t) {
      const std::size_t re = edge_of(t, ref_local[t]);
      if (split[re]) continue;
      if (split[edge_of(t, 0)] || split[edge_of(t, 1)] || split[edge_of(t, 2)]) {
        split[re] = 1;
        changed = true;
      }
    }
  }

  std::vector<Point> nodes(mesh.nodes().begin(), mesh.nodes().end());
  std::vector<NodePair> parents(mesh.parents().begin(), mesh.parents().end());
  std::vector<int> midpoint_node(table.edges.size(), -1);
  for (std::size_t e = 0; e < table.edges.size(); ++e) {
    if (!split[e]) continue;
    const NodePair p = table.edges[e];
    midpoint_node[e] = static_cast<int>(nodes.size());
    nodes.push_back(midpoint(nodes[static_cast<std::size_t>(p.a)], nodes[static_cast<std::size_t>(p.b)]));
    parents.push_back(p);
  }

  std::vector<Triangle> out;
  out.reserve(2 * nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const int k = ref_local[t];
    const std::size_t re = edge_of(t, k);
    if (!split[re]) {
      out.push_back(triangles[t]);
      continue;
    }
    // Rotate so the refinement edge (b, c) is opposite a.
    const int a = triangles[t][static_cast<std::size_t>(k)];
    const int b = triangles[t][static_cast<std::size_t>((k + 1) % 3)];
    const int c = triangles[t][static_cast<std::size_t>((k + 2) % 3)];
    const int m = midpoint_node[re];
    const int m_ab = midpoint_node[edge_of(t, (k + 2) % 3)];
    const int m_ca = midpoint_node[edge_of(t, (k + 1) % 3)];
    if (m_ab >= 0) {
      out.push_back({m, a, m_ab});
      out.push_back({m, m_ab, b});
    } else {
      out.push_back({a, b, m});
    }
    if (m_ca >= 0) {
      out.push_back({m, c, m_ca});
      out.push_back({m, m_ca, a});
    } else {
      out.push_back({a, m, c});
    }
  }

  std::vector<BoundaryEdge> boundary;
  boundary.reserve(2 * mesh.boundary_edges().size());
  for (const BoundaryEdge& e : mesh.boundary_edges()) {
    // Boundary edges are never duplicated, so a binary search over the sorted keys finds the id.
    const std::uint64_t key = detail::edge_key(e.a, e.b);
    const auto it = std::lower_bound(table.edges.begin(), table.edges.end(), key,
                                     [](const NodePair& p, std::uint64_t k) { return detail::edge_key(p.a, p.b) < k; });
    const int m = midpoint_node[static_cast<std::size_t>(it - table.edges.begin())];
    if (m >= 0) {
      boundary.push_back({e.a, m, e.tag});
      boundary.push_back({m, e.b, e.tag});
    } else {
      boundary.push_back(e);
    }
  }

  return TriMesh(mesh.domain_ptr(), std::move(nodes), std::move(out), std::move(boundary), std::move(parents),
                 mesh.lineage(), mesh.passes() + 1);
}

}  // namespace

TriMesh bisect_refine(const TriMesh& mesh) {
  return refine_marked(mesh, std::vector<char>(mesh.n_triangles(), 1));
}

}  // namespace dbc
