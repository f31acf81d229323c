#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dbc/mesh.hpp"

namespace dbc::detail {

inline std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(a < b ? a : b);
  const auto hi = static_cast<std::uint64_t>(a < b ? b : a);
  return lo << 32 | hi;
}

inline NodePair key_to_pair(std::uint64_t key) {
  return {static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu)};
}

/// Unique edges of a triangle list. Local edge k of triangle t is opposite
/// vertex k; its id is local_to_edge[3 * t + k]. Ids follow sorted key order.
struct EdgeTable {
  std::vector<NodePair> edges;
  std::vector<int> multiplicity;
  std::vector<int> local_to_edge;
};

EdgeTable build_edge_table(std::span<const Triangle> triangles);

std::uint64_t lineage_hash(const PolygonalDomain& domain, std::span<const Point> nodes,
                           std::span<const Triangle> triangles);

TriMesh make_initial(const PolygonalDomain& domain, std::vector<Point> nodes, std::vector<Triangle> triangles,
                     std::vector<BoundaryEdge> boundary);

}  // namespace dbc::detail
