#include "dbc/fem.hpp"

#include <array>
#include <cmath>
#include <string>

#include "dbc/error.hpp"

namespace dbc {

AnalyticFunction AnalyticFunction::constant(double c) {
  return {[c](Point) { return c; }, [](Point) { return Point{0.0, 0.0}; }};
}

DofLayout::DofLayout(const TriMesh& mesh)
    : boundary_nodes(mesh.boundary_nodes().begin(), mesh.boundary_nodes().end()),
      boundary_slot(mesh.n_nodes(), -1),
      interior_slot(mesh.n_nodes(), -1) {
  for (std::size_t k = 0; k < boundary_nodes.size(); ++k) {
    boundary_slot[static_cast<std::size_t>(boundary_nodes[k])] = static_cast<int>(k);
  }
  interior_nodes.reserve(mesh.n_interior_nodes());
  for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
    if (boundary_slot[i] < 0) {
      interior_slot[i] = static_cast<int>(interior_nodes.size());
      interior_nodes.push_back(static_cast<int>(i));
    }
  }
}

namespace {

struct ElementGeometry {
  std::array<Point, 3> p;
  double area;
  std::array<Point, 3> grad;  // gradients of the barycentric coordinates
};

ElementGeometry element(const TriMesh& mesh, std::size_t t) {
  const Triangle& tri = mesh.triangles()[t];
  ElementGeometry g;
  for (int k = 0; k < 3; ++k) g.p[static_cast<std::size_t>(k)] = mesh.node(tri[static_cast<std::size_t>(k)]);
  const double twice_area = cross(g.p[1] - g.p[0], g.p[2] - g.p[0]);
  if (!(twice_area > 0.0)) throw InvalidInput("degenerate triangle " + std::to_string(t));
  g.area = 0.5 * twice_area;
  for (std::size_t k = 0; k < 3; ++k) {
    const Point e = g.p[(k + 2) % 3] - g.p[(k + 1) % 3];
    g.grad[k] = {-e.y / twice_area, e.x / twice_area};
  }
  return g;
}

// Degree-5 seven-point rule: barycentric points and weights (sum 1).
struct TriRule {
  std::array<std::array<double, 3>, 7> bary;
  std::array<double, 7> weight;
};

const TriRule& degree5_rule() {
  static const TriRule rule = [] {
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0, b1 = 1.0 - 2.0 * a1, w1 = (155.0 - s15) / 1200.0;
    const double a2 = (6.0 + s15) / 21.0, b2 = 1.0 - 2.0 * a2, w2 = (155.0 + s15) / 1200.0;
    TriRule r;
    r.bary = {{{1.0 / 3, 1.0 / 3, 1.0 / 3},
               {a1, a1, b1},
               {a1, b1, a1},
               {b1, a1, a1},
               {a2, a2, b2},
               {a2, b2, a2},
               {b2, a2, a2}}};
    r.weight = {9.0 / 40.0, w1, w1, w1, w2, w2, w2};
    return r;
  }();
  return rule;
}

template <class LocalMatrix>
CsrMatrix assemble_volume(const TriMesh& mesh, LocalMatrix&& local) {
  std::vector<Triplet> triplets;
  triplets.reserve(9 * mesh.n_triangles());
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const ElementGeometry g = element(mesh, t);
    const Triangle& tri = mesh.triangles()[t];
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) triplets.push_back({tri[i], tri[j], local(g, i, j)});
    }
  }
  return assemble_from_triplets(mesh.n_nodes(), mesh.n_nodes(), triplets);
}

}  // namespace

CsrMatrix assemble_stiffness(const TriMesh& mesh) {
  return assemble_volume(mesh, [](const ElementGeometry& g, std::size_t i, std::size_t j) {
    return g.area * dot(g.grad[i], g.grad[j]);
  });
}

CsrMatrix assemble_mass(const TriMesh& mesh) {
  return assemble_volume(mesh, [](const ElementGeometry& g, std::size_t i, std::size_t j) {
    return g.area / 12.0 * (i == j ? 2.0 : 1.0);
  });
}

CsrMatrix assemble_boundary_mass(const TriMesh& mesh) {
  const DofLayout layout(mesh);
  std::vector<Triplet> triplets;
  triplets.reserve(4 * mesh.boundary_edges().size());
  for (const BoundaryEdge& e : mesh.boundary_edges()) {
    const double len = norm(mesh.node(e.b) - mesh.node(e.a));
    const int a = layout.boundary_slot[static_cast<std::size_t>(e.a)];
    const int b = layout.boundary_slot[static_cast<std::size_t>(e.b)];
    triplets.push_back({a, a, len / 3.0});
    triplets.push_back({b, b, len / 3.0});
    triplets.push_back({a, b, len / 6.0});
    triplets.push_back({b, a, len / 6.0});
  }
  const std::size_t nb = mesh.n_boundary_nodes();
  return assemble_from_triplets(nb, nb, triplets);
}

Vector load_vector(const TriMesh& mesh, const AnalyticFunction& f) {
  Vector b(mesh.n_nodes(), 0.0);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Triangle& tri = mesh.triangles()[t];
    const Point p0 = mesh.node(tri[0]), p1 = mesh.node(tri[1]), p2 = mesh.node(tri[2]);
    const double area = 0.5 * cross(p1 - p0, p2 - p0);
    // Edge midpoint k is opposite vertex k; phi_i = 1/2 at the two adjacent midpoints.
    const double f0 = f(midpoint(p1, p2)), f1 = f(midpoint(p2, p0)), f2 = f(midpoint(p0, p1));
    const double w = area / 6.0;
    b[static_cast<std::size_t>(tri[0])] += w * (f1 + f2);
    b[static_cast<std::size_t>(tri[1])] += w * (f2 + f0);
    b[static_cast<std::size_t>(tri[2])] += w * (f0 + f1);
  }
  return b;
}

Vector boundary_load_vector(const TriMesh& mesh, const EdgeFunction& g) {
  const DofLayout layout(mesh);
  Vector b(mesh.n_boundary_nodes(), 0.0);
  const double d = 0.5 / std::sqrt(3.0);
  const double ts[2] = {0.5 - d, 0.5 + d};
  for (const BoundaryEdge& e : mesh.boundary_edges()) {
    const Point pa = mesh.node(e.a), pb = mesh.node(e.b);
    const double half_len = 0.5 * norm(pb - pa);
    double ba = 0.0, bb = 0.0;
    for (double t : ts) {
      const double v = g(pa + t * (pb - pa), e.tag);
      ba += half_len * (1.0 - t) * v;
      bb += half_len * t * v;
    }
    b[static_cast<std::size_t>(layout.boundary_slot[static_cast<std::size_t>(e.a)])] += ba;
    b[static_cast<std::size_t>(layout.boundary_slot[static_cast<std::size_t>(e.b)])] += bb;
  }
  return b;
}

Vector boundary_load_vector(const TriMesh& mesh, const AnalyticFunction& g) {
  return boundary_load_vector(mesh, [&g](Point p, int) { return g(p); });
}

FieldFunction nodal_interpolant(const TriMesh& mesh, const AnalyticFunction& v) {
  FieldFunction u{Vector(mesh.n_nodes())};
  for (std::size_t i = 0; i < mesh.n_nodes(); ++i) u.values[i] = v(mesh.nodes()[i]);
  return u;
}

BoundaryFunction nodal_trace_interpolant(const TriMesh& mesh, const AnalyticFunction& v) {
  BoundaryFunction z{Vector(mesh.n_boundary_nodes())};
  for (std::size_t k = 0; k < z.values.size(); ++k) z.values[k] = v(mesh.node(mesh.boundary_nodes()[k]));
  return z;
}

BoundaryFunction trace(const TriMesh& mesh, const FieldFunction& u) {
  if (u.values.size() != mesh.n_nodes()) throw InvalidInput("trace: field does not match mesh");
  BoundaryFunction z{Vector(mesh.n_boundary_nodes())};
  for (std::size_t k = 0; k < z.values.size(); ++k) {
    z.values[k] = u.values[static_cast<std::size_t>(mesh.boundary_nodes()[k])];
  }
  return z;
}

namespace {

double quadratic_form(const CsrMatrix& a, std::span<const double> u) {
  if (u.size() != a.rows()) throw InvalidInput("norm: coefficient count does not match matrix");
  const Vector au = a.multiply(u);
  return kernels::dot(u, au);
}

}  // namespace

double h1_seminorm(const CsrMatrix& stiffness, const FieldFunction& u) {
  return std::sqrt(std::max(0.0, quadratic_form(stiffness, u.values)));
}

double l2_norm(const CsrMatrix& mass, const FieldFunction& u) {
  return std::sqrt(std::max(0.0, quadratic_form(mass, u.values)));
}

double boundary_l2_norm(const CsrMatrix& boundary_mass, const BoundaryFunction& z) {
  return std::sqrt(std::max(0.0, quadratic_form(boundary_mass, z.values)));
}

double l2_error(const TriMesh& mesh, const FieldFunction& u, const AnalyticFunction& v) {
  if (u.values.size() != mesh.n_nodes()) throw InvalidInput("l2_error: field does not match mesh");
  const TriRule& rule = degree5_rule();
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const ElementGeometry g = element(mesh, t);
    const Triangle& tri = mesh.triangles()[t];
    double local = 0.0;
    for (std::size_t q = 0; q < rule.weight.size(); ++q) {
      const auto& l = rule.bary[q];
      const Point x = l[0] * g.p[0] + l[1] * g.p[1] + l[2] * g.p[2];
      double uh = 0.0;
      for (std::size_t k = 0; k < 3; ++k) uh += l[k] * u.values[static_cast<std::size_t>(tri[k])];
      const double e = v(x) - uh;
      local += rule.weight[q] * e * e;
    }
    sum += g.area * local;
  }
  return std::sqrt(sum);
}

double h1_error(const TriMesh& mesh, const FieldFunction& u, const AnalyticFunction& v) {
  if (!v.has_gradient()) throw InvalidInput("h1_error needs the gradient of the exact function");
  if (u.values.size() != mesh.n_nodes()) throw InvalidInput("h1_error: field does not match mesh");
  const TriRule& rule = degree5_rule();
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const ElementGeometry g = element(mesh, t);
    const Triangle& tri = mesh.triangles()[t];
    Point grad_h{0.0, 0.0};
    for (std::size_t k = 0; k < 3; ++k) grad_h = grad_h + u.values[static_cast<std::size_t>(tri[k])] * g.grad[k];
    double local = 0.0;
    for (std::size_t q = 0; q < rule.weight.size(); ++q) {
      const auto& l = rule.bary[q];
      const Point x = l[0] * g.p[0] + l[1] * g.p[1] + l[2] * g.p[2];
      const Point e = v.gradient(x) - grad_h;
      local += rule.weight[q] * dot(e, e);
    }
    sum += g.area * local;
  }
  return std::sqrt(sum);
}

double boundary_l2_error(const TriMesh& mesh, const BoundaryFunction& z, const EdgeFunction& g) {
  if (z.values.size() != mesh.n_boundary_nodes()) throw InvalidInput("boundary_l2_error: size mismatch");
  const DofLayout layout(mesh);
  // Five-point Gauss-Legendre on [0, 1].
  static const double nodes[5] = {0.046910077030668, 0.230765344947158, 0.5, 0.769234655052842, 0.953089922969332};
  static const double weights[5] = {0.118463442528095, 0.239314335249683, 0.284444444444444, 0.239314335249683,
                                    0.118463442528095};
  double sum = 0.0;
  for (const BoundaryEdge& e : mesh.boundary_edges()) {
    const Point pa = mesh.node(e.a), pb = mesh.node(e.b);
    const double len = norm(pb - pa);
    const double za = z.values[static_cast<std::size_t>(layout.boundary_slot[static_cast<std::size_t>(e.a)])];
    const double zb = z.values[static_cast<std::size_t>(layout.boundary_slot[static_cast<std::size_t>(e.b)])];
    for (int q = 0; q < 5; ++q) {
      const double t = nodes[q];
      const double diff = g(pa + t * (pb - pa), e.tag) - ((1.0 - t) * za + t * zb);
      sum += len * weights[q] * diff * diff;
    }
  }
  return std::sqrt(sum);
}

}  // namespace dbc
