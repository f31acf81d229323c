#include <cmath>

#include "doctest.h"
#include "dbc/error.hpp"
#include "support.hpp"

using namespace dbc;

namespace {

struct DenseBlocks {
  Eigen::MatrixXd aii, aib, abb, mb, schur;
};

/// Dense interior/boundary blocks and the Schur complement A_BB - A_BI A_II^-1 A_IB.
DenseBlocks dense_blocks(const FeSpace& s) {
  const Eigen::MatrixXd a = test::dense(s.stiffness());
  const auto& in = s.layout().interior_nodes;
  const auto& bn = s.layout().boundary_nodes;
  DenseBlocks d;
  d.aii = a(in, in);
  d.aib = a(in, bn);
  d.abb = a(bn, bn);
  d.mb = test::dense(s.boundary_mass());
  d.schur = d.abb - d.aib.transpose() * d.aii.ldlt().solve(d.aib);
  return d;
}

}  // namespace

TEST_SUITE("boundary_ops") {
  TEST_CASE("variational normal derivative satisfies Green's identity") {
    for (const auto& name : builtin_domain_names()) {
      const FeSpace s(test::mesh_at(name, 4));
      const AnalyticFunction f{[](Point p) { return 1.0 + p.x * p.y; }, {}};
      const Vector load = load_vector(s.mesh(), f);
      const Vector g = test::random_vector(s.n_boundary(), 1);
      Vector rhs_i = s.gather_interior(load);
      const Vector lift = s.stiffness().multiply(s.combine(Vector(s.n_interior(), 0.0), g).values);
      const Vector lift_i = s.gather_interior(lift);
      for (std::size_t k = 0; k < rhs_i.size(); ++k) rhs_i[k] -= lift_i[k];
      const FieldFunction y = s.combine(s.solve_interior(rhs_i), g);
      const BoundaryFunction dn = normal_derivative(s, y, f);
      const Vector mdn = s.boundary_mass().multiply(dn.values);
      const Vector ay = s.stiffness().multiply(y.values);
      for (std::uint64_t seed = 10; seed < 13; ++seed) {
        const Vector v = test::random_vector(s.n_nodes(), seed);
        const Vector vb = s.gather_boundary(v);
        double lhs = 0.0;
        double rhs = 0.0;
        double scale = 0.0;
        for (std::size_t k = 0; k < vb.size(); ++k) lhs += mdn[k] * vb[k];
        for (std::size_t i = 0; i < v.size(); ++i) {
          rhs += ay[i] * v[i] - load[i] * v[i];
          scale += std::abs(ay[i] * v[i]) + std::abs(load[i] * v[i]);
        }
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, scale));
      }
    }
  }

  TEST_CASE("normal derivative of a linear function is the projected exact one") {
    const FeSpace s(test::mesh_at("omega135", 5));
    const AnalyticFunction y{[](Point p) { return 2.0 * p.x + 0.5 * p.y; }, [](Point) { return Point{2.0, 0.5}; }};
    const BoundaryFunction dn = normal_derivative(s, nodal_interpolant(s.mesh(), y), AnalyticFunction::zero());
    const PolygonalDomain& d = s.mesh().domain();
    const EdgeFunction exact = [&](Point, int tag) { return dot(Point{2.0, 0.5}, d.edge_normal(static_cast<std::size_t>(tag))); };
    const BoundaryFunction q = l2_projection(s, exact);
    CHECK(test::max_abs_diff(dn.values, q.values) < 1e-10);
  }

  TEST_CASE("Steklov-Poincare operator equals the dense Schur complement") {
    for (const auto& name : builtin_domain_names()) {
      CAPTURE(name);
      const FeSpace s(test::mesh_at(name, 4));
      const DenseBlocks d = dense_blocks(s);
      const BoundaryFunction z{test::random_vector(s.n_boundary(), 3)};
      const Vector nz = steklov_poincare_functional(s, z);
      const Eigen::VectorXd ref = d.schur * test::to_eigen(z.values);
      CHECK((test::to_eigen(nz) - ref).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, ref.cwiseAbs().maxCoeff()));

      // <N z, z> = ||grad S z||^2.
      const double nzz = test::to_eigen(nz).dot(test::to_eigen(z.values));
      const double energy = h_half_seminorm(s, z);
      CHECK(std::abs(nzz - energy * energy) < 1e-10 * std::max(1.0, nzz));

      // Symmetry <N z, w> = <z, N w>.
      const BoundaryFunction w{test::random_vector(s.n_boundary(), 4)};
      const double nzw = test::to_eigen(nz).dot(test::to_eigen(w.values));
      const double znw = test::to_eigen(z.values).dot(test::to_eigen(steklov_poincare_functional(s, w)));
      CHECK(std::abs(nzw - znw) < 1e-10 * std::max(1.0, std::abs(nzw)));

      // Kernel = constants: N 1 = 0 and all other eigenvalues are positive.
      const Vector n1 = steklov_poincare_functional(s, BoundaryFunction{Vector(s.n_boundary(), 1.0)});
      for (double v : n1) CHECK(std::abs(v) < 1e-10);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(d.schur);
      CHECK(std::abs(eig.eigenvalues()(0)) < 1e-10);
      CHECK(eig.eigenvalues()(1) > 1e-3);
    }
  }

  TEST_CASE("harmonic and zero extensions") {
    const FeSpace s(test::mesh_at("omega270", 4));
    const BoundaryFunction z{test::random_vector(s.n_boundary(), 5)};
    const FieldFunction u = harmonic_extension(s, z);
    CHECK(s.gather_boundary(u.values) == z.values);
    const Vector au = s.stiffness().multiply(u.values);
    for (double r : s.gather_interior(au)) CHECK(std::abs(r) < 1e-12);
    // Discrete Dirichlet principle: S z has less energy than the zero extension.
    CHECK(h1_seminorm(s.stiffness(), u) < h1_seminorm(s.stiffness(), zero_extension(s, z)));
    const FieldFunction e = zero_extension(s, z);
    for (double v : s.gather_interior(e.values)) CHECK(v == 0.0);
  }

  TEST_CASE("L2 boundary projection is idempotent") {
    const FeSpace s(test::mesh_at("omega135", 4));
    const AnalyticFunction g{[](Point p) { return std::cos(3.0 * p.x) + p.y * p.y; }, {}};
    const BoundaryFunction q = l2_projection(s, g);
    // Evaluate the P1 trace q piecewise linearly along each boundary edge.
    const TriMesh& mesh = s.mesh();
    const auto& slot = s.layout().boundary_slot;
    std::vector<BoundaryEdge> edges(mesh.boundary_edges().begin(), mesh.boundary_edges().end());
    const EdgeFunction qf = [&](Point p, int) {
      for (const auto& e : edges) {
        const Point a = mesh.node(e.a);
        const Point b = mesh.node(e.b);
        if (distance_to_segment(p, a, b) < 1e-13) {
          const double t = norm(p - a) / norm(b - a);
          return (1.0 - t) * q.values[static_cast<std::size_t>(slot[static_cast<std::size_t>(e.a)])] +
                 t * q.values[static_cast<std::size_t>(slot[static_cast<std::size_t>(e.b)])];
        }
      }
      throw InvalidInput("point not on the boundary");
    };
    const BoundaryFunction qq = l2_projection(s, qf);
    CHECK(test::max_abs_diff(q.values, qq.values) < 1e-12);
    // Orthogonality: (g - Q g, v) = 0 for the trace basis.
    const Vector bg = boundary_load_vector(mesh, g);
    const Vector mq = s.boundary_mass().multiply(q.values);
    CHECK(test::max_abs_diff(bg, mq) < 1e-13);
  }

  TEST_CASE("modified interpolant has trace Q_h g and nodal interior values") {
    const FeSpace s(test::mesh_at("omega90", 4));
    const AnalyticFunction y{[](Point p) { return p.x * p.x - p.y * p.y; }, {}};
    const FieldFunction u = modified_interpolant(s, y, y);
    CHECK(test::max_abs_diff(s.gather_boundary(u.values), l2_projection(s, y).values) == 0.0);
    const FieldFunction iy = nodal_interpolant(s.mesh(), y);
    CHECK(s.gather_interior(u.values) == s.gather_interior(iy.values));
  }

  TEST_CASE("Robin solve and discrete H^-1/2 norm against dense oracles") {
    for (const auto& name : builtin_domain_names()) {
      CAPTURE(name);
      const FeSpace s(test::mesh_at(name, 3));
      const DenseBlocks d = dense_blocks(s);
      const auto& bn = s.layout().boundary_nodes;
      for (double w : {1.0, 0.01, 1e3}) {
        Eigen::MatrixXd robin = test::dense(s.stiffness());
        robin(bn, bn) += w * d.mb;
        const Vector rhs = test::random_vector(s.n_nodes(), 6);
        const Eigen::VectorXd ref = robin.ldlt().solve(test::to_eigen(rhs));
        const Vector x = s.solve_robin(rhs, w);
        CHECK((test::to_eigen(x) - ref).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
      }
      const BoundaryFunction v{test::random_vector(s.n_boundary(), 7)};
      const Eigen::VectorXd mv = d.mb * test::to_eigen(v.values);
      const double ref = std::sqrt(mv.dot((d.schur + d.mb).ldlt().solve(mv)));
      CHECK(h_minus_half_norm(s, v) == doctest::Approx(ref).epsilon(1e-10));
      const double hn = std::sqrt(test::to_eigen(v.values).dot((d.schur + d.mb) * test::to_eigen(v.values)));
      CHECK(h_half_norm(s, v) == doctest::Approx(hn).epsilon(1e-10));
      // Duality: (v, v)_Gamma <= ||v||_{-1/2,h} ||v||_{1/2,h}.
      CHECK(mv.dot(test::to_eigen(v.values)) <= h_minus_half_norm(s, v) * h_half_norm(s, v) * (1.0 + 1e-12));
      CHECK_THROWS_AS(s.solve_robin(Vector(s.n_nodes(), 0.0), -1.0), InvalidInput);
    }
  }

  TEST_CASE("dimension mismatches are rejected") {
    const FeSpace s(test::mesh_at("omega90", 2));
    CHECK_THROWS_AS(harmonic_extension(s, BoundaryFunction{Vector(3, 0.0)}), InvalidInput);
    CHECK_THROWS_AS(normal_derivative(s, FieldFunction{Vector(3, 0.0)}, AnalyticFunction::zero()), InvalidInput);
    CHECK_THROWS_AS(s.solve_interior(Vector(s.n_interior() + 4, 0.0)), InvalidInput);
  }
}
