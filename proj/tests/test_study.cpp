#include <cmath>

#include "doctest.h"
#include "dbc/config.hpp"
#include "dbc/error.hpp"
#include "dbc/functions.hpp"
#include "support.hpp"

using namespace dbc;

namespace {

ControlStudySpec small_study(const std::string& domain, int coarsest, int finest, int offset = 2) {
  ControlStudySpec spec;
  spec.domain = domain;
  spec.problem.u_d = make_function("x + y");
  spec.study.coarsest_row = coarsest;
  spec.study.finest_row = finest;
  spec.study.reference_offset = offset;
  spec.study.threads = 1;
  return spec;
}

}  // namespace

TEST_SUITE("study") {
  TEST_CASE("EOC from consecutive errors") {
    CHECK(compute_eoc({4e-3, 2e-3})[0] == doctest::Approx(1.0));
    CHECK(compute_eoc({1e-2, 2.5e-3})[0] == doctest::Approx(2.0));
    // Published H1 column, rows 2^-6 and 2^-7 of the unit square table.
    CHECK(std::round(100.0 * compute_eoc({8.43e-4, 4.19e-4})[0]) / 100.0 == doctest::Approx(1.01));
    const std::vector<double> flagged = compute_eoc({1.0, 0.0, -1.0, 0.5});
    REQUIRE(flagged.size() == 3);
    for (double v : flagged) CHECK(std::isnan(v));
    CHECK(std::isnan(compute_eoc({1e-14, 1e-15}, 1e-12)[0]));
    CHECK(compute_eoc({1.0}).empty());
  }

  TEST_CASE("control study table layout") {
    const ConvergenceTable t = run_control_study(small_study("omega90", 1, 3));
    REQUIRE(t.rows.size() == 3);
    CHECK(t.reference_row == 5);
    CHECK(t.metrics == control_metric_names());
    CHECK(t.theory == std::vector<double>{1.0, 2.0, 1.5});
    CHECK(t.rows[0].h_sqrt2 == doctest::Approx(1.0));
    CHECK(t.rows[2].h_sqrt2 == doctest::Approx(0.25));
    for (double e : t.rows[0].eoc) CHECK(std::isnan(e));
    for (const auto& r : t.rows) {
      for (double e : r.errors) CHECK(e > 0.0);
    }
    const std::string csv = t.to_csv();
    CHECK(csv.rfind("h_sqrt2,n_interior,n_boundary,err_H1_state,eoc,err_L2_control,eoc,err_H12_control,eoc\n", 0) == 0);
    CHECK(csv.find("theory,,,,1.000000,,2.000000,,1.500000") != std::string::npos);
    CHECK(csv.find("1,1,8,") != std::string::npos);
    const std::string md = t.to_markdown();
    CHECK(md.find("2^-1") != std::string::npos);
    CHECK(md.find("theory |") != std::string::npos);
  }

  TEST_CASE("theory rows follow the largest corner angle") {
    const ConvergenceTable t135 = run_control_study(small_study("omega135", 0, 1));
    CHECK(t135.theory[1] == doctest::Approx(11.0 / 6.0));
    CHECK(t135.theory[2] == doctest::Approx(4.0 / 3.0));
    const ConvergenceTable t270 = run_control_study(small_study("omega270", 0, 1));
    CHECK(t270.theory[0] == doctest::Approx(2.0 / 3.0));
    CHECK(t270.theory[1] == doctest::Approx(7.0 / 6.0));
    CHECK(t270.theory[2] == doctest::Approx(2.0 / 3.0));
  }

  TEST_CASE("zero data: all errors vanish and rates are undefined") {
    ControlStudySpec spec = small_study("omega135", 1, 3);
    spec.problem.u_d = AnalyticFunction::zero();
    const ConvergenceTable t = run_control_study(spec);
    for (const auto& r : t.rows) {
      for (double e : r.errors) CHECK(e == 0.0);
      for (double e : r.eoc) CHECK(std::isnan(e));
    }
    CHECK(t.to_csv().find(",0,,0,,0,\n") != std::string::npos);
  }

  TEST_CASE("a level compared with itself has zero error") {
    const TriMesh mesh = test::mesh_at("omega270", 6);
    const FeSpace s(mesh);
    ControlProblem p;
    p.u_d = make_function("x + y");
    const ControlSolution sol = solve_control(p, s);
    const Vector pu = prolongate(sol.u.values, mesh, mesh);
    FieldFunction e{pu};
    for (std::size_t i = 0; i < e.values.size(); ++i) e.values[i] -= sol.u.values[i];
    CHECK(h1_seminorm(s.stiffness(), e) == 0.0);
    CHECK(h_half_seminorm(s, trace(mesh, e)) == 0.0);
  }

  TEST_CASE("tables are reproducible and independent of the thread count") {
    ControlStudySpec spec = small_study("omega270", 1, 3);
    const std::string a = run_control_study(spec).to_csv();
    const std::string b = run_control_study(spec).to_csv();
    spec.study.threads = 3;
    const std::string c = run_control_study(spec).to_csv();
    CHECK(a == b);
    CHECK(a == c);
  }

  TEST_CASE("reference refinement barely moves the rates") {
    const ConvergenceTable near = run_control_study(small_study("omega90", 3, 5, 3));
    const ConvergenceTable far = run_control_study(small_study("omega90", 3, 5, 4));
    for (std::size_t m = 0; m < 3; ++m) {
      CAPTURE(m);
      for (std::size_t i = 1; i < near.rows.size(); ++i) CHECK(std::abs(near.rows[i].eoc[m] - far.rows[i].eoc[m]) < 0.05);
    }
  }

  TEST_CASE("metric selection and argument validation") {
    ControlStudySpec spec = small_study("omega90", 1, 2);
    spec.study.metrics = {"H12_control"};
    const ConvergenceTable t = run_control_study(spec);
    CHECK(t.metrics == std::vector<std::string>{"H12_control"});
    CHECK(t.rows[0].errors.size() == 1);
    CHECK_THROWS_AS(t.metric_index("H1_state"), InvalidInput);
    spec.study.metrics = {"bogus"};
    CHECK_THROWS_AS(run_control_study(spec), InvalidInput);
    CHECK_THROWS_AS(run_control_study(small_study("omega90", 3, 2)), InvalidInput);
    CHECK_THROWS_AS(run_control_study(small_study("omega90", 1, 2, 1)), InvalidInput);
    CHECK_THROWS_AS(run_control_study(small_study("omega42", 1, 2)), InvalidInput);
  }

  TEST_CASE("boundary value study: linear data is reproduced exactly") {
    BvpStudySpec spec;
    spec.domain = "omega135";
    spec.exact = make_function("x + y");
    spec.study.coarsest_row = 1;
    spec.study.finest_row = 3;
    const ConvergenceTable t = run_bvp_study(spec);
    for (const auto& r : t.rows) {
      CHECK(r.errors[t.metric_index("L2_state")] < 1e-13);
      CHECK(r.errors[t.metric_index("H1_state")] < 1e-12);
      CHECK(std::isnan(r.eoc[t.metric_index("L2_state")]));
      CHECK(std::isnan(r.eoc[t.metric_index("H1_state")]));
    }
  }

  TEST_CASE("boundary value study: smooth harmonic data") {
    BvpStudySpec spec;
    spec.domain = "omega90";
    spec.exact = make_function("x^2 - y^2");
    spec.study.coarsest_row = 3;
    spec.study.finest_row = 5;
    const ConvergenceTable t = run_bvp_study(spec);
    CHECK(t.rows.back().eoc[t.metric_index("L2_state")] == doctest::Approx(2.0).epsilon(0.05));
    CHECK(t.rows.back().eoc[t.metric_index("H1_state")] == doctest::Approx(1.0).epsilon(0.05));
    CHECK(t.rows.back().eoc[t.metric_index("Hm12_normal_derivative")] > 1.3);
    BvpStudySpec no_grad = spec;
    no_grad.exact = AnalyticFunction{[](Point p) { return p.x; }, {}};
    CHECK_THROWS_AS(run_bvp_study(no_grad), InvalidInput);
  }

  TEST_CASE("thread count resolution") {
    CHECK(study_thread_count(4, 2) == 2);
    CHECK(study_thread_count(1, 10) == 1);
    CHECK(study_thread_count(0, 10) >= 1);
  }
}
