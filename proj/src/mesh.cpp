#include "dbc/mesh.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

#include "dbc/error.hpp"
#include "mesh_internal.hpp"

namespace dbc {

namespace detail {

EdgeTable build_edge_table(std::span<const Triangle> triangles) {
  struct Entry {
    std::uint64_t key;
    std::uint32_t slot;  // 3 * triangle + local edge
  };
  std::vector<Entry> entries;
  entries.reserve(3 * triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int a = triangles[t][static_cast<std::size_t>((k + 1) % 3)];
      const int b = triangles[t][static_cast<std::size_t>((k + 2) % 3)];
      entries.push_back({edge_key(a, b), static_cast<std::uint32_t>(3 * t + static_cast<std::size_t>(k))});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return x.key != y.key ? x.key < y.key : x.slot < y.slot;
  });

  EdgeTable table;
  table.local_to_edge.assign(entries.size(), -1);
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    while (j < entries.size() && entries[j].key == entries[i].key) ++j;
    const int id = static_cast<int>(table.edges.size());
    table.edges.push_back(key_to_pair(entries[i].key));
    table.multiplicity.push_back(static_cast<int>(j - i));
    for (std::size_t k = i; k < j; ++k) table.local_to_edge[entries[k].slot] = id;
    i = j;
  }
  return table;
}

}  // namespace detail

namespace {

double squared_length(Point a, Point b) {
  const Point d = b - a;
  return dot(d, d);
}

}  // namespace

TriMesh::TriMesh(std::shared_ptr<const PolygonalDomain> domain, std::vector<Point> nodes,
                 std::vector<Triangle> triangles, std::vector<BoundaryEdge> boundary_edges,
                 std::vector<NodePair> parents, std::uint64_t lineage, int passes)
    : domain_(std::move(domain)),
      nodes_(std::move(nodes)),
      triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges)),
      parents_(std::move(parents)),
      lineage_(lineage),
      passes_(passes) {
  if (!domain_) throw InvalidInput("mesh without domain");
  if (nodes_.empty() || triangles_.empty()) throw InvalidInput("mesh must have nodes and triangles");
  if (parents_.size() != nodes_.size()) throw InvalidInput("parent map size does not match node count");
  const int n = static_cast<int>(nodes_.size());

  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const Triangle& tri = triangles_[t];
    for (int v : tri) {
      if (v < 0 || v >= n) throw InvalidInput("triangle " + std::to_string(t) + " references missing node");
    }
    const Point a = node(tri[0]), b = node(tri[1]), c = node(tri[2]);
    const double twice_area = cross(b - a, c - a);
    const double scale = std::max({squared_length(a, b), squared_length(b, c), squared_length(c, a)});
    if (!(twice_area > 1e-14 * scale)) {
      throw InvalidInput("triangle " + std::to_string(t) + " is degenerate or clockwise");
    }
  }

  for (std::size_t i = 0; i < parents_.size(); ++i) {
    const NodePair p = parents_[i];
    if (p.a == -1 && p.b == -1) continue;
    if (p.a < 0 || p.b < 0 || p.a >= static_cast<int>(i) || p.b >= static_cast<int>(i)) {
      throw InvalidInput("parent edge of node " + std::to_string(i) + " must reference older nodes");
    }
  }

  // Edges used once must be exactly the boundary edges, with matching orientation.
  const detail::EdgeTable table = detail::build_edge_table(triangles_);
  std::vector<std::uint64_t> open_edges;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int id = table.local_to_edge[3 * t + static_cast<std::size_t>(k)];
      const int m = table.multiplicity[static_cast<std::size_t>(id)];
      if (m > 2) throw InvalidInput("edge shared by more than two triangles");
      if (m == 1) {
        const int a = triangles_[t][static_cast<std::size_t>((k + 1) % 3)];
        const int b = triangles_[t][static_cast<std::size_t>((k + 2) % 3)];
        open_edges.push_back(static_cast<std::uint64_t>(a) << 32 | static_cast<std::uint32_t>(b));
      }
    }
  }
  std::vector<std::uint64_t> declared;
  declared.reserve(boundary_edges_.size());
  for (const BoundaryEdge& e : boundary_edges_) {
    if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n) throw InvalidInput("boundary edge references missing node");
    declared.push_back(static_cast<std::uint64_t>(e.a) << 32 | static_cast<std::uint32_t>(e.b));
  }
  std::sort(open_edges.begin(), open_edges.end());
  std::sort(declared.begin(), declared.end());
  if (open_edges != declared) {
    throw InvalidInput("boundary edge list does not match the triangulation (hanging node or wrong orientation)");
  }

  const double tol = 1e-12 * std::max(1.0, domain_->diameter());
  const std::size_t n_poly = domain_->num_vertices();
  boundary_flag_.assign(nodes_.size(), 0);
  std::vector<int> next(nodes_.size(), -1);
  for (const BoundaryEdge& e : boundary_edges_) {
    if (e.tag < 0 || static_cast<std::size_t>(e.tag) >= n_poly) throw InvalidInput("boundary edge tag out of range");
    const Point v0 = domain_->vertex(static_cast<std::size_t>(e.tag));
    const Point v1 = domain_->vertex((static_cast<std::size_t>(e.tag) + 1) % n_poly);
    if (distance_to_segment(node(e.a), v0, v1) > tol || distance_to_segment(node(e.b), v0, v1) > tol) {
      throw InvalidInput("boundary edge does not lie on polygon edge " + std::to_string(e.tag));
    }
    if (next[static_cast<std::size_t>(e.a)] != -1) throw InvalidInput("boundary is not a single closed curve");
    next[static_cast<std::size_t>(e.a)] = e.b;
    boundary_flag_[static_cast<std::size_t>(e.a)] = 1;
    boundary_flag_[static_cast<std::size_t>(e.b)] = 1;
  }

  int start = -1;
  for (int i = 0; i < n; ++i) {
    if (boundary_flag_[static_cast<std::size_t>(i)] && domain_->corner_at(node(i)) == std::optional<std::size_t>{0}) {
      start = i;
      break;
    }
  }
  if (start < 0) throw InvalidInput("no mesh node at polygon vertex 0");
  for (std::size_t j = 0; j < n_poly; ++j) {
    bool found = false;
    for (int i = 0; i < n && !found; ++i) {
      found = boundary_flag_[static_cast<std::size_t>(i)] && domain_->corner_at(node(i)) == std::optional<std::size_t>{j};
    }
    if (!found) throw InvalidInput("no mesh node at polygon vertex " + std::to_string(j));
  }
  boundary_nodes_.reserve(boundary_edges_.size());
  int cur = start;
  do {
    boundary_nodes_.push_back(cur);
    cur = next[static_cast<std::size_t>(cur)];
    if (cur < 0 || boundary_nodes_.size() > boundary_edges_.size()) {
      throw InvalidInput("boundary is not a single closed curve");
    }
  } while (cur != start);
  if (boundary_nodes_.size() != boundary_edges_.size()) throw InvalidInput("boundary is not a single closed curve");
}

std::optional<NodePair> TriMesh::parent(int i) const {
  const NodePair p = parents_[static_cast<std::size_t>(i)];
  if (p.a < 0) return std::nullopt;
  return p;
}

std::optional<std::size_t> TriMesh::corner_of(int i) const {
  if (!is_boundary(i)) return std::nullopt;
  return domain_->corner_at(node(i));
}

double TriMesh::triangle_area(std::size_t t) const {
  const Triangle& tri = triangles_[t];
  return 0.5 * cross(node(tri[1]) - node(tri[0]), node(tri[2]) - node(tri[0]));
}

double TriMesh::h() const {
  double h2 = 0.0;
  for (const Triangle& tri : triangles_) {
    const Point a = node(tri[0]), b = node(tri[1]), c = node(tri[2]);
    h2 = std::max({h2, squared_length(a, b), squared_length(b, c), squared_length(c, a)});
  }
  return std::sqrt(h2);
}

double TriMesh::min_angle() const {
  double best = std::numbers::pi;
  for (const Triangle& tri : triangles_) {
    for (int k = 0; k < 3; ++k) {
      const Point p = node(tri[static_cast<std::size_t>(k)]);
      const Point u = node(tri[static_cast<std::size_t>((k + 1) % 3)]) - p;
      const Point v = node(tri[static_cast<std::size_t>((k + 2) % 3)]) - p;
      best = std::min(best, std::atan2(std::abs(cross(u, v)), dot(u, v)));
    }
  }
  return best;
}

namespace detail {

std::uint64_t lineage_hash(const PolygonalDomain& domain, std::span<const Point> nodes,
                           std::span<const Triangle> triangles) {
  // FNV-1a over the initial mesh content.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  mix(domain.name().data(), domain.name().size());
  for (const Point& p : nodes) {
    mix(&p.x, sizeof p.x);
    mix(&p.y, sizeof p.y);
  }
  for (const Triangle& t : triangles) mix(t.data(), sizeof(int) * 3);
  return h;
}

TriMesh make_initial(const PolygonalDomain& domain, std::vector<Point> nodes, std::vector<Triangle> triangles,
                     std::vector<BoundaryEdge> boundary) {
  const std::uint64_t lineage = lineage_hash(domain, nodes, triangles);
  std::vector<NodePair> parents(nodes.size());
  return TriMesh(std::make_shared<const PolygonalDomain>(domain), std::move(nodes), std::move(triangles),
                 std::move(boundary), std::move(parents), lineage, 0);
}

}  // namespace detail

TriMesh initial_mesh(const PolygonalDomain& domain) {
  const auto& v = domain.vertices();
  auto same_as = [&](std::vector<Point> expected) {
    return v.size() == expected.size() && std::equal(v.begin(), v.end(), expected.begin());
  };
  if (domain.name() == "omega90" && same_as({{0, 0}, {1, 0}, {1, 1}, {0, 1}})) {
    return detail::make_initial(domain, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}},
                                {{0, 1, 0}, {1, 2, 1}, {2, 3, 2}, {3, 0, 3}});
  }
  if (domain.name() == "omega135" && same_as({{0, 0}, {1, 0}, {1, 1}, {-1, 1}})) {
    return detail::make_initial(domain, {{0, 0}, {1, 0}, {1, 1}, {-1, 1}, {0, 1}},
                                {{0, 1, 2}, {0, 2, 4}, {0, 4, 3}},
                                {{0, 1, 0}, {1, 2, 1}, {2, 4, 2}, {4, 3, 2}, {3, 0, 3}});
  }
  if (domain.name() == "omega270" && same_as({{0, 0}, {0, 1}, {-1, 1}, {-1, -1}, {1, -1}, {1, 0}})) {
    // Fan around the reentrant corner; hypotenuses are the diagonals through it.
    return detail::make_initial(
        domain, {{0, 0}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}},
        {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 6}, {0, 6, 7}},
        {{0, 1, 0}, {1, 2, 1}, {2, 3, 2}, {3, 4, 2}, {4, 5, 3}, {5, 6, 3}, {6, 7, 4}, {7, 0, 5}});
  }
  throw InvalidInput("no structured initial mesh for domain '" + domain.name() + "'; use triangulate_custom");
}

TriMesh triangulate_custom(const PolygonalDomain& domain) {
  const auto verts = domain.vertices();
  const std::size_t n = verts.size();
  std::vector<Point> nodes(verts.begin(), verts.end());
  std::vector<Triangle> triangles;
  std::vector<int> ring(n);
  for (std::size_t i = 0; i < n; ++i) ring[i] = static_cast<int>(i);

  auto inside = [](Point p, Point a, Point b, Point c) {
    return cross(b - a, p - a) >= 0 && cross(c - b, p - b) >= 0 && cross(a - c, p - c) >= 0;
  };
  while (ring.size() > 3) {
    const std::size_t m = ring.size();
    std::size_t ear = m;
    double best_quality = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      const int ia = ring[(i + m - 1) % m], ib = ring[i], ic = ring[(i + 1) % m];
      const Point a = nodes[static_cast<std::size_t>(ia)], b = nodes[static_cast<std::size_t>(ib)],
                  c = nodes[static_cast<std::size_t>(ic)];
      const double twice_area = cross(b - a, c - a);
      if (twice_area <= 1e-14 * std::max(squared_length(a, b), squared_length(b, c))) continue;
      bool blocked = false;
      for (std::size_t j = 0; j < m && !blocked; ++j) {
        const int ip = ring[j];
        if (ip == ia || ip == ib || ip == ic) continue;
        blocked = inside(nodes[static_cast<std::size_t>(ip)], a, b, c);
      }
      if (blocked) continue;
      // Prefer the ear with the best shape to keep the first mesh regular.
      const double quality = twice_area / (squared_length(a, b) + squared_length(b, c) + squared_length(c, a));
      if (quality > best_quality) {
        best_quality = quality;
        ear = i;
      }
    }
    if (ear == m) throw InvalidInput("ear clipping failed for polygon '" + domain.name() + "'");
    triangles.push_back({ring[(ear + m - 1) % m], ring[ear], ring[(ear + 1) % m]});
    ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(ear));
  }
  triangles.push_back({ring[0], ring[1], ring[2]});

  std::vector<BoundaryEdge> boundary;
  for (std::size_t j = 0; j < n; ++j) {
    boundary.push_back({static_cast<int>(j), static_cast<int>((j + 1) % n), static_cast<int>(j)});
  }
  return detail::make_initial(domain, std::move(nodes), std::move(triangles), std::move(boundary));
}

TriMesh refine_uniform(const TriMesh& mesh, int passes) {
  if (passes < 0) throw InvalidInput("negative number of refinement passes");
  TriMesh out = mesh;
  for (int i = 0; i < passes; ++i) out = bisect_refine(out);
  return out;
}

bool is_nested(const TriMesh& coarse, const TriMesh& fine) {
  if (coarse.lineage() != fine.lineage() || fine.passes() < coarse.passes()) return false;
  if (fine.n_nodes() < coarse.n_nodes()) return false;
  for (std::size_t i = 0; i < coarse.n_nodes(); ++i) {
    if (!(coarse.nodes()[i] == fine.nodes()[i])) return false;
  }
  for (std::size_t i = coarse.n_nodes(); i < fine.n_nodes(); ++i) {
    if (!fine.parent(static_cast<int>(i))) return false;
  }
  return true;
}

std::vector<double> prolongate(std::span<const double> coarse_values, const TriMesh& coarse, const TriMesh& fine) {
  if (coarse_values.size() != coarse.n_nodes()) throw InvalidInput("prolongate: value count does not match mesh");
  if (!is_nested(coarse, fine)) throw InvalidInput("prolongate: meshes are not nested");
  std::vector<double> out(fine.n_nodes());
  std::copy(coarse_values.begin(), coarse_values.end(), out.begin());
  const auto parents = fine.parents();
  for (std::size_t i = coarse.n_nodes(); i < fine.n_nodes(); ++i) {
    const NodePair p = parents[i];
    out[i] = 0.5 * (out[static_cast<std::size_t>(p.a)] + out[static_cast<std::size_t>(p.b)]);
  }
  return out;
}

}  // namespace dbc
