// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: dbc_acceptance [--known-red 3,4]
// Exit status is 0 iff every failing criterion is listed in --known-red.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "dbc/config.hpp"
#include "dbc/functions.hpp"
#include "kkt_oracle.hpp"

using namespace dbc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

/// Published absolute errors at h*sqrt(2) = 2^-4, 2^-5, 2^-6 (rows 5..7) per metric.
struct Published {
  double values[3][3];
};

std::string corridor_note(const ConvergenceTable& t, const Published& p) {
  std::ostringstream out;
  out << "paper corridor (+-25%) ratios ours/paper:";
  for (std::size_t m = 0; m < 3; ++m) {
    out << ' ' << t.metrics[m] << '[';
    for (std::size_t k = 0; k < 3; ++k) {
      const double ratio = t.rows[t.rows.size() - 3 + k].errors[m] / p.values[k][m];
      out << fmt("%.2f%s", ratio, std::abs(ratio - 1.0) <= 0.25 ? "" : "!") << (k < 2 ? " " : "");
    }
    out << ']';
  }
  return out.str();
}

Outcome control_rates(const std::string& preset_name, const double target[3], double tol, double seconds_limit,
                      const Published& published, const std::function<bool(const ConvergenceTable&, std::string&)>& extra) {
  const auto t0 = Clock::now();
  RunConfig config = preset(preset_name);
  config.threads = 1;
  const ConvergenceTable t = run_control_study(make_control_study(config));
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const ConvergenceRow& last = t.rows.back();
  bool ok = true;
  std::string detail = "final-row EOC (";
  for (std::size_t m = 0; m < 3; ++m) {
    ok = ok && within(last.eoc[m], target[m], tol);
    detail += fmt("%.2f%s", last.eoc[m], m < 2 ? ", " : "");
  }
  detail += fmt(") target (%.2f, %.2f, %.2f) +-%.2f; %.1f s", target[0], target[1], target[2], tol, secs);
  if (seconds_limit > 0.0) {
    ok = ok && secs < seconds_limit;
    detail += fmt(" (limit %.0f s)", seconds_limit);
  }
  if (extra) ok = extra(t, detail) && ok;
  detail += "\n      " + corridor_note(t, published);
  return {ok, detail};
}

ConvergenceTable bvp_table(const std::string& domain, const std::string& exact) {
  BvpStudySpec spec;
  spec.domain = domain;
  spec.exact = make_function(exact);
  spec.study.coarsest_row = 3;
  spec.study.finest_row = 7;
  spec.study.metrics = {"Hm12_normal_derivative"};
  spec.study.threads = 1;
  return run_bvp_study(spec);
}

Outcome bvp_rates(const std::string& domain, const std::string& exact, double target, double tol, double seconds_limit) {
  const auto t0 = Clock::now();
  const ConvergenceTable t = bvp_table(domain, exact);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  bool ok = true;
  std::string detail = "EOC over the last three rows (";
  for (std::size_t k = t.rows.size() - 3; k < t.rows.size(); ++k) {
    ok = ok && within(t.rows[k].eoc[0], target, tol);
    detail += fmt("%.2f%s", t.rows[k].eoc[0], k + 1 < t.rows.size() ? ", " : "");
  }
  detail += fmt(") target %.2f +-%.2f; %.1f s", target, tol, secs);
  if (seconds_limit > 0.0) {
    ok = ok && secs < seconds_limit;
    detail += fmt(" (limit %.0f s)", seconds_limit);
  }
  return {ok, detail};
}

Outcome kkt_equivalence() {
  ControlProblem problem;
  problem.u_d = make_function("x + y");
  double worst = 0.0;
  int cases = 0;
  for (const auto& name : builtin_domain_names()) {
    TriMesh mesh = initial_mesh(builtin_domain(name));
    while (mesh.n_nodes() <= 200) {
      const FeSpace s(mesh);
      const ControlSolution sol = solve_control(problem, s);
      const test::KktSolution ref = test::dense_kkt(s, problem);
      worst = std::max({worst, (test::to_eigen(sol.z.values) - ref.z).cwiseAbs().maxCoeff(),
                        (test::to_eigen(sol.u.values) - ref.u).cwiseAbs().maxCoeff(),
                        (test::to_eigen(sol.p.values) - ref.p).cwiseAbs().maxCoeff()});
      ++cases;
      mesh = bisect_refine(mesh);
    }
  }
  return {worst < 1e-8, fmt("max |reduced - KKT| over (z, u, p) = %.2e on %d meshes (limit 1e-8)", worst, cases)};
}

Outcome structural_invariants() {
  const auto t0 = Clock::now();
  double green = 0.0;
  double energy = 0.0;
  double symmetry = 0.0;
  double kernel = 0.0;
  double kernel_gap = 1e300;
  double idempotence = 0.0;
  double prolongation = 0.0;
  double row_sums = 0.0;
  double unity = 0.0;
  for (const auto& name : builtin_domain_names()) {
    const TriMesh coarse = refine_uniform(initial_mesh(builtin_domain(name)), 3);
    const TriMesh mesh = refine_uniform(coarse, 2);
    const FeSpace s(mesh);
    const auto rel = [](double a, double b, double scale) { return std::abs(a - b) / std::max(1.0, scale); };

    // Green's identity for the variational normal derivative.
    const AnalyticFunction f = make_function("1 + x*y");
    const Vector load = load_vector(mesh, f);
    const Vector g = test::random_vector(s.n_boundary(), 1);
    Vector rhs_i = s.gather_interior(load);
    const Vector lift_i = s.gather_interior(s.stiffness().multiply(s.combine(Vector(s.n_interior(), 0.0), g).values));
    for (std::size_t k = 0; k < rhs_i.size(); ++k) rhs_i[k] -= lift_i[k];
    const FieldFunction y = s.combine(s.solve_interior(rhs_i), g);
    const Vector mdn = s.boundary_mass().multiply(normal_derivative(s, y, f).values);
    const Vector v = test::random_vector(s.n_nodes(), 2);
    const Vector ay = s.stiffness().multiply(y.values);
    double lhs = 0.0;
    double rhs = 0.0;
    double scale = 0.0;
    const Vector vb = s.gather_boundary(v);
    for (std::size_t k = 0; k < vb.size(); ++k) lhs += mdn[k] * vb[k];
    for (std::size_t i = 0; i < v.size(); ++i) {
      rhs += (ay[i] - load[i]) * v[i];
      scale += std::abs(ay[i] * v[i]) + std::abs(load[i] * v[i]);
    }
    green = std::max(green, rel(lhs, rhs, scale));

    // <N z, z> = ||grad S z||^2 and symmetry.
    const BoundaryFunction z{test::random_vector(s.n_boundary(), 3)};
    const BoundaryFunction w{test::random_vector(s.n_boundary(), 4)};
    const Vector nz = steklov_poincare_functional(s, z);
    const Vector nw = steklov_poincare_functional(s, w);
    const double nzz = test::to_eigen(nz).dot(test::to_eigen(z.values));
    const double e = h_half_seminorm(s, z);
    energy = std::max(energy, rel(nzz, e * e, nzz));
    const double nzw = test::to_eigen(nz).dot(test::to_eigen(w.values));
    const double znw = test::to_eigen(z.values).dot(test::to_eigen(nw));
    symmetry = std::max(symmetry, rel(nzw, znw, std::abs(nzw)));

    // Kernel = constants: N 1 = 0 and N is definite on mean-free data.
    for (double x : steklov_poincare_functional(s, BoundaryFunction{Vector(s.n_boundary(), 1.0)})) {
      kernel = std::max(kernel, std::abs(x));
    }
    const Vector ones(s.n_boundary(), 1.0);
    Vector zm = z.values;
    const double mean = test::to_eigen(s.boundary_mass().multiply(zm)).sum() / mesh.domain().perimeter();
    for (double& x : zm) x -= mean;
    const double nmm = test::to_eigen(steklov_poincare_functional(s, BoundaryFunction{zm})).dot(test::to_eigen(zm));
    kernel_gap = std::min(kernel_gap, nmm / test::to_eigen(s.boundary_mass().multiply(zm)).dot(test::to_eigen(zm)));

    // Q_h idempotence: projecting a trace-space function's functional returns it.
    const Vector mz = s.boundary_mass().multiply(z.values);
    idempotence = std::max(idempotence, test::max_abs_diff(s.solve_boundary_mass(mz), z.values));

    // Prolongation exactness for linears and for a level against itself.
    const auto lin = make_function("2*x - y + 0.25");
    const Vector pl = prolongate(nodal_interpolant(coarse, lin).values, coarse, mesh);
    prolongation = std::max(prolongation, test::max_abs_diff(pl, nodal_interpolant(mesh, lin).values));
    prolongation = std::max(prolongation, test::max_abs_diff(prolongate(y.values, mesh, mesh), y.values));

    // Stiffness zero row sums; mass and boundary-mass partition of unity.
    for (double r : s.stiffness().multiply(Vector(s.n_nodes(), 1.0))) row_sums = std::max(row_sums, std::abs(r));
    unity = std::max(unity, std::abs(test::to_eigen(s.mass().multiply(Vector(s.n_nodes(), 1.0))).sum() - mesh.domain().area()));
    unity = std::max(unity, std::abs(test::to_eigen(s.boundary_mass().multiply(ones)).sum() - mesh.domain().perimeter()));
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool ok = green < 1e-10 && energy < 1e-10 && symmetry < 1e-10 && kernel < 1e-10 && kernel_gap > 1e-6 &&
                  idempotence < 1e-10 && prolongation < 1e-12 && row_sums < 1e-10 && unity < 1e-12 && secs < 10.0;
  return {ok, fmt("green %.1e, <Nz,z>-|grad Sz|^2 %.1e, symmetry %.1e, N1 %.1e (gap %.2g), Q_h %.1e, prolongation %.1e, "
                  "row sums %.1e, unity %.1e; %.2f s (limit 10 s)",
                  green, energy, symmetry, kernel, kernel_gap, idempotence, prolongation, row_sums, unity, secs)};
}

Outcome large_nu() {
  ControlProblem problem;
  problem.nu = 1e8;
  problem.u_d = make_function("x + y");
  const FeSpace s(refine_uniform(initial_mesh(builtin_domain("omega90")), passes_for_row(5)));
  const ControlSolution sol = solve_control(problem, s);
  double dev = 0.0;
  for (double v : sol.z.values) dev = std::max(dev, std::abs(v - 1.0));
  return {dev < 1e-3, fmt("max |z_h - 1| = %.2e at h*sqrt(2) = 2^-4 (limit 1e-3)", dev)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known_red;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--known-red") {
      std::stringstream ss(argv[i + 1]);
      for (std::string item; std::getline(ss, item, ',');) known_red.insert(std::stoi(item));
    }
  }

  const double t90[3] = {1.00, 2.00, 1.50};
  const double t135[3] = {1.00, 1.83, 1.33};
  const double t270[3] = {0.67, 1.17, 0.67};
  const Published p90{{{3.37e-03, 6.27e-05, 4.93e-04}, {1.69e-03, 1.57e-05, 1.71e-04}, {8.43e-04, 3.92e-06, 6.04e-05}}};
  const Published p135{{{5.93e-03, 1.56e-04, 1.06e-03}, {2.98e-03, 4.19e-05, 4.05e-04}, {1.49e-03, 1.13e-05, 1.58e-04}}};
  const Published p270{{{1.71e-01, 3.68e-02, 9.83e-02}, {1.06e-01, 1.51e-02, 6.07e-02}, {6.53e-02, 6.11e-03, 3.74e-02}}};

  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "omega90 control rates", [&] { return control_rates("table1", t90, 0.15, 120.0, p90, {}); }},
      {2, "omega135 control rates, H1/2 below 1.45",
       [&] {
         return control_rates("table2", t135, 0.15, 0.0, p135, [](const ConvergenceTable& t, std::string& d) {
           const double h12 = t.rows.back().eoc[2];
           d += fmt("; H1/2 EOC %.2f < 1.45", h12);
           return h12 < 1.45;
         });
       }},
      {3, "omega270 control rates", [&] { return control_rates("table3", t270, 0.15, 0.0, p270, {}); }},
      {4, "normal derivative rate, x^2 - y^2 on omega90", [] { return bvp_rates("omega90", "x^2 - y^2", 1.5, 0.2, 60.0); }},
      {5, "normal derivative rate, singular_2_3 on omega270", [] { return bvp_rates("omega270", "singular_2_3", 2.0 / 3.0, 0.15, 0.0); }},
      {6, "reduced solve equals dense KKT on meshes <= 200 nodes", kkt_equivalence},
      {7, "structural invariants", structural_invariants},
      {8, "large nu drives the control to mean(u_d)", large_nu},
  };

  int unexpected = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool known = known_red.count(c.id) > 0;
    const char* status = o.pass ? (known ? "PASS (listed as known red)" : "PASS") : (known ? "FAIL (known red)" : "FAIL");
    std::printf("[%s] criterion %d: %s\n      %s\n", status, c.id, c.title, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !known) ++unexpected;
  }
  std::printf("%d unexpected failure(s)\n", unexpected);
  return unexpected == 0 ? 0 : 1;
}
