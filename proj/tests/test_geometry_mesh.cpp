#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "dbc/error.hpp"
#include "support.hpp"

using namespace dbc;
using std::numbers::pi;

TEST_SUITE("geometry_mesh") {
  TEST_CASE("builtin domains: angles and singular exponents") {
    const PolygonalDomain d90 = builtin_domain("omega90");
    const PolygonalDomain d135 = builtin_domain("omega135");
    const PolygonalDomain d270 = builtin_domain("omega270");
    for (double a : d90.corner_angles()) CHECK(a == doctest::Approx(pi / 2));
    CHECK(d90.lambda_bar() == doctest::Approx(2.0));
    CHECK(d135.omega_max() == doctest::Approx(3 * pi / 4));
    CHECK(d135.lambda_bar() == doctest::Approx(4.0 / 3.0));
    CHECK(d270.omega_max() == doctest::Approx(3 * pi / 2));
    CHECK(d270.lambda_bar() == doctest::Approx(2.0 / 3.0));
    CHECK(d90.area() == doctest::Approx(1.0));
    CHECK(d135.area() == doctest::Approx(1.5));
    CHECK(d270.area() == doctest::Approx(3.0));
    CHECK(d270.perimeter() == doctest::Approx(8.0));
    double angle_sum = 0.0;
    for (double a : d270.corner_angles()) angle_sum += a;
    CHECK(angle_sum == doctest::Approx((6 - 2) * pi));
    CHECK_THROWS_AS(builtin_domain("omega45"), InvalidInput);
  }

  TEST_CASE("edge normals point outward") {
    for (const auto& name : builtin_domain_names()) {
      const PolygonalDomain d = builtin_domain(name);
      for (std::size_t j = 0; j < d.num_vertices(); ++j) {
        const Point mid = midpoint(d.vertex(j), d.vertex((j + 1) % d.num_vertices()));
        const Point n = d.edge_normal(j);
        CHECK(norm(n) == doctest::Approx(1.0));
        const Point inside = mid - 1e-3 * n;
        const Point outside = mid + 1e-3 * n;
        CHECK(d.distance_to_boundary(inside) == doctest::Approx(1e-3));
        CHECK(d.nearest_edge(outside) == j);
      }
    }
  }

  TEST_CASE("polygon validation") {
    CHECK_THROWS_AS(PolygonalDomain::from_vertices("two", {{0, 0}, {1, 0}}), InvalidInput);
    CHECK_THROWS_AS(PolygonalDomain::from_vertices("cw", {{0, 0}, {0, 1}, {1, 1}, {1, 0}}), InvalidInput);
    CHECK_THROWS_AS(PolygonalDomain::from_vertices("bowtie", {{0, 0}, {1, 1}, {1, 0}, {0, 1}}), InvalidInput);
    CHECK_THROWS_AS(PolygonalDomain::from_vertices("repeat", {{0, 0}, {1, 0}, {1, 0}, {0, 1}}), InvalidInput);
    CHECK_THROWS_AS(PolygonalDomain::from_vertices("nan", {{0, 0}, {1, 0}, {std::nan(""), 1}}), InvalidInput);
    CHECK_NOTHROW(PolygonalDomain::from_vertices("tri", {{0, 0}, {1, 0}, {0, 1}}));
  }

  TEST_CASE("initial meshes") {
    CHECK(initial_mesh(builtin_domain("omega90")).n_triangles() == 2);
    CHECK(initial_mesh(builtin_domain("omega135")).n_triangles() == 3);
    CHECK(initial_mesh(builtin_domain("omega270")).n_triangles() == 6);
    for (const auto& name : builtin_domain_names()) {
      const TriMesh m = initial_mesh(builtin_domain(name));
      CHECK(m.h() * std::sqrt(2.0) == doctest::Approx(2.0));
      CHECK(m.passes() == 0);
      CHECK(m.boundary_nodes()[0] == 0);
      CHECK(m.node(m.boundary_nodes()[0]) == m.domain().vertex(0));
    }
  }

  TEST_CASE("refined node counts reproduce the published tables") {
    struct Row {
      const char* domain;
      int passes;
      std::size_t interior;
      std::size_t boundary;
    };
    // h*sqrt(2) = 2^-4 .. 2^-6 rows of the three published tables.
    for (const Row r : {Row{"omega90", 10, 961, 128}, Row{"omega90", 12, 3969, 256}, Row{"omega90", 14, 16129, 512},
                        Row{"omega135", 10, 1457, 160}, Row{"omega135", 12, 5985, 320}, Row{"omega135", 14, 24257, 640},
                        Row{"omega270", 10, 2945, 256}, Row{"omega270", 12, 12033, 512}, Row{"omega270", 14, 48641, 1024}}) {
      CAPTURE(r.domain);
      CAPTURE(r.passes);
      const TriMesh m = test::mesh_at(r.domain, r.passes);
      CHECK(m.n_interior_nodes() == r.interior);
      CHECK(m.n_boundary_nodes() == r.boundary);
      CHECK(m.h() * std::sqrt(2.0) == doctest::Approx(std::ldexp(1.0, 1 - r.passes / 2)));
    }
  }

  TEST_CASE("bisection preserves area, shape and node numbering") {
    for (const auto& name : builtin_domain_names()) {
      TriMesh m = initial_mesh(builtin_domain(name));
      const double min_angle0 = m.min_angle();
      for (int k = 0; k < 5; ++k) {
        const TriMesh fine = bisect_refine(m);
        double area = 0.0;
        for (std::size_t t = 0; t < fine.n_triangles(); ++t) area += fine.triangle_area(t);
        CHECK(area == doctest::Approx(m.domain().area()).epsilon(1e-13));
        CHECK(fine.min_angle() >= min_angle0 - 1e-12);
        CHECK(fine.passes() == m.passes() + 1);
        CHECK(fine.lineage() == m.lineage());
        for (std::size_t i = 0; i < m.n_nodes(); ++i) CHECK(fine.node(static_cast<int>(i)) == m.node(static_cast<int>(i)));
        for (std::size_t i = m.n_nodes(); i < fine.n_nodes(); ++i) {
          const auto parent = fine.parent(static_cast<int>(i));
          REQUIRE(parent.has_value());
          CHECK(fine.node(static_cast<int>(i)) == midpoint(fine.node(parent->a), fine.node(parent->b)));
        }
        m = fine;
      }
    }
  }

  TEST_CASE("nesting and prolongation") {
    const TriMesh coarse = test::mesh_at("omega135", 2);
    const TriMesh fine = refine_uniform(coarse, 3);
    CHECK(is_nested(coarse, fine));
    CHECK(is_nested(coarse, coarse));
    CHECK_FALSE(is_nested(fine, coarse));
    CHECK_FALSE(is_nested(coarse, test::mesh_at("omega90", 5)));

    auto linear = [](Point p) { return 3.0 * p.x - 2.0 * p.y + 0.5; };
    Vector cv(coarse.n_nodes());
    for (std::size_t i = 0; i < cv.size(); ++i) cv[i] = linear(coarse.node(static_cast<int>(i)));
    const Vector fv = prolongate(cv, coarse, fine);
    for (std::size_t i = 0; i < fv.size(); ++i) CHECK(fv[i] == doctest::Approx(linear(fine.node(static_cast<int>(i)))));

    const Vector r = test::random_vector(coarse.n_nodes(), 3);
    const Vector pr = prolongate(r, coarse, fine);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(pr[i] == r[i]);
    CHECK(prolongate(r, coarse, coarse) == r);
    CHECK_THROWS_AS(prolongate(pr, fine, coarse), InvalidInput);
    CHECK_THROWS_AS(prolongate(Vector(3, 0.0), coarse, fine), InvalidInput);
  }

  TEST_CASE("mesh text format round trip") {
    const TriMesh m = test::mesh_at("omega270", 3);
    std::stringstream ss;
    write_mesh(ss, m);
    const TriMesh back = read_mesh(ss);
    CHECK(back.n_nodes() == m.n_nodes());
    CHECK(back.lineage() == m.lineage());
    CHECK(back.passes() == m.passes());
    for (std::size_t i = 0; i < m.n_nodes(); ++i) CHECK(back.node(static_cast<int>(i)) == m.node(static_cast<int>(i)));
    CHECK(std::equal(back.triangles().begin(), back.triangles().end(), m.triangles().begin()));
    CHECK(is_nested(back, bisect_refine(m)));

    std::stringstream bad("dbc-mesh 1\ndomain omega90 4\n0 0\n1 0\n");
    CHECK_THROWS_AS(read_mesh(bad), IoError);
    std::stringstream garbage("not a mesh");
    CHECK_THROWS_AS(read_mesh(garbage), IoError);
  }

  TEST_CASE("mesh validation rejects broken input") {
    const auto dom = std::make_shared<const PolygonalDomain>(builtin_domain("omega90"));
    const std::vector<Point> nodes{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const std::vector<BoundaryEdge> bnd{{0, 1, 0}, {1, 2, 1}, {2, 3, 2}, {3, 0, 3}};
    const std::vector<NodePair> parents(4);
    CHECK_NOTHROW(TriMesh(dom, nodes, {{0, 1, 2}, {0, 2, 3}}, bnd, parents, 1, 0));
    CHECK_THROWS_AS(TriMesh(dom, nodes, {{0, 2, 1}, {0, 2, 3}}, bnd, parents, 1, 0), InvalidInput);
    CHECK_THROWS_AS(TriMesh(dom, nodes, {{0, 1, 2}}, bnd, parents, 1, 0), InvalidInput);
    CHECK_THROWS_AS(TriMesh(dom, nodes, {{0, 1, 2}, {0, 2, 3}}, {{0, 1, 0}, {1, 2, 1}, {2, 3, 0}, {3, 0, 3}}, parents, 1, 0),
                    InvalidInput);
  }

  TEST_CASE("ear clipping on a custom polygon") {
    const PolygonalDomain d =
        PolygonalDomain::from_vertices("notch", {{0, 0}, {2, 0}, {2, 2}, {1, 1}, {0, 2}});
    const TriMesh m = triangulate_custom(d);
    CHECK(m.n_triangles() == 3);
    double area = 0.0;
    for (std::size_t t = 0; t < m.n_triangles(); ++t) area += m.triangle_area(t);
    CHECK(area == doctest::Approx(d.area()));
    const TriMesh fine = refine_uniform(m, 4);
    CHECK(fine.n_boundary_nodes() > m.n_boundary_nodes());
    CHECK_THROWS_AS(initial_mesh(d), InvalidInput);
  }
}
