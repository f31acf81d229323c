#include "dbc/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <sstream>
#include <thread>

#include "dbc/error.hpp"
#include "dbc/functions.hpp"

namespace dbc {

MeshHierarchy::MeshHierarchy(const std::string& domain, int max_passes) {
  if (max_passes < 0) throw InvalidInput("mesh hierarchy: negative pass count");
  const PolygonalDomain dom = builtin_domain(domain);
  meshes_.push_back(std::make_shared<const TriMesh>(initial_mesh(dom)));
  for (int k = 0; k < max_passes; ++k) meshes_.push_back(std::make_shared<const TriMesh>(bisect_refine(*meshes_.back())));
}

const std::shared_ptr<const TriMesh>& MeshHierarchy::at_passes(int passes) const {
  if (passes < 0 || static_cast<std::size_t>(passes) >= meshes_.size()) {
    throw InvalidInput("mesh hierarchy: no mesh with " + std::to_string(passes) + " passes");
  }
  return meshes_[static_cast<std::size_t>(passes)];
}

std::vector<double> compute_eoc(const std::vector<double>& errors, double noise_floor) {
  std::vector<double> eoc;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    const double a = errors[k];
    const double b = errors[k + 1];
    const bool ok = std::isfinite(a) && std::isfinite(b) && a > noise_floor && b > noise_floor && a > 0.0 && b > 0.0;
    eoc.push_back(ok ? std::log2(a / b) : std::nan(""));
  }
  return eoc;
}

std::vector<std::string> control_metric_names() { return {"H1_state", "L2_control", "H12_control"}; }

std::vector<std::string> bvp_metric_names() { return {"Hm12_normal_derivative", "L2_state", "H1_state", "projection"}; }

std::size_t ConvergenceTable::metric_index(const std::string& name) const {
  const auto it = std::find(metrics.begin(), metrics.end(), name);
  if (it == metrics.end()) throw InvalidInput("table has no metric '" + name + "'");
  return static_cast<std::size_t>(it - metrics.begin());
}

namespace {

std::string fmt(const char* pattern, double v, const char* undefined = "—") {
  if (!std::isfinite(v)) return undefined;
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string h_label(double h_sqrt2) {
  const double k = -std::log2(h_sqrt2);
  const double kr = std::round(k);
  if (std::abs(k - kr) < 1e-9) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "2^%d", -static_cast<int>(kr));
    return buf;
  }
  return fmt("%.4g", h_sqrt2);
}

std::string csv_header(const std::vector<std::string>& metrics) {
  std::string s = "h_sqrt2,n_interior,n_boundary";
  for (const auto& m : metrics) s += ",err_" + m + ",eoc";
  return s;
}

std::vector<std::string> select_metrics(const std::vector<std::string>& all, const std::vector<std::string>& requested) {
  if (requested.empty()) return all;
  for (const auto& m : requested) {
    if (std::find(all.begin(), all.end(), m) == all.end()) throw InvalidInput("unknown metric '" + m + "'");
  }
  std::vector<std::string> out;
  for (const auto& m : all) {
    if (std::find(requested.begin(), requested.end(), m) != requested.end()) out.push_back(m);
  }
  return out;
}

void validate_rows(const StudyOptions& o) {
  if (o.coarsest_row < 0) throw InvalidInput("coarsest row must be non-negative");
  if (o.finest_row < o.coarsest_row) throw InvalidInput("empty level range: finest row is coarser than coarsest row");
}

/// Runs task(i) for i in [0, n) on up to `threads` workers; rethrows the
/// failure of the smallest index.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const auto count = static_cast<std::size_t>(std::max(1, threads));
  if (count <= 1 || n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(count, n); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

template <class F>
auto with_level_report(int row, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SolverFailure& e) {
    throw SolverFailure("row " + std::to_string(row) + ": " + e.what(), e.residual(), e.iterations());
  } catch (const InvalidInput& e) {
    throw InvalidInput("row " + std::to_string(row) + ": " + e.what());
  }
}

void fill_eoc(ConvergenceTable& table, double noise_floor) {
  for (std::size_t m = 0; m < table.metrics.size(); ++m) {
    std::vector<double> errs;
    for (const auto& r : table.rows) errs.push_back(r.errors[m]);
    const std::vector<double> eoc = compute_eoc(errs, noise_floor);
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
      table.rows[k].eoc.resize(table.metrics.size(), std::nan(""));
      if (k > 0) table.rows[k].eoc[m] = eoc[k - 1];
    }
  }
}

ConvergenceTable project_metrics(ConvergenceTable full, const std::vector<std::string>& selected) {
  ConvergenceTable t;
  t.title = full.title;
  t.metrics = selected;
  t.reference_row = full.reference_row;
  for (const auto& m : selected) t.theory.push_back(full.theory[full.metric_index(m)]);
  for (const auto& r : full.rows) {
    ConvergenceRow row = r;
    row.errors.clear();
    row.eoc.clear();
    for (const auto& m : selected) {
      row.errors.push_back(r.errors[full.metric_index(m)]);
      row.eoc.push_back(r.eoc[full.metric_index(m)]);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace

std::string ConvergenceTable::to_csv() const {
  std::ostringstream out;
  out << csv_header(metrics) << '\n';
  for (const auto& r : rows) {
    out << fmt("%.17g", r.h_sqrt2, "") << ',' << r.n_interior << ',' << r.n_boundary;
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      out << ',' << fmt("%.17g", r.errors[m], "") << ',' << fmt("%.6f", r.eoc[m], "");
    }
    out << '\n';
  }
  out << "theory,,";
  for (double t : theory) out << ",," << fmt("%.6f", t, "");
  out << '\n';
  return out.str();
}

std::string ConvergenceTable::to_markdown() const {
  std::vector<std::string> header{"h*sqrt(2)", "interior", "boundary"};
  for (const auto& m : metrics) {
    header.push_back(m);
    header.push_back("eoc");
  }
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    std::vector<std::string> line{h_label(r.h_sqrt2), std::to_string(r.n_interior), std::to_string(r.n_boundary)};
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      line.push_back(fmt("%.2e", r.errors[m]));
      line.push_back(fmt("%.2f", r.eoc[m]));
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::string> theory_line{"theory", "", ""};
  for (double t : theory) {
    theory_line.push_back("");
    theory_line.push_back(fmt("%.2f", t));
  }
  cells.push_back(std::move(theory_line));

  std::vector<std::size_t> width(header.size(), 0);
  auto display_width = [](const std::string& s) {
    std::size_t w = 0;
    for (unsigned char c : s) w += (c & 0xC0) != 0x80 ? 1 : 0;
    return w;
  };
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = display_width(header[c]);
    for (const auto& line : cells) width[c] = std::max(width[c], display_width(line[c]));
  }
  auto emit = [&](std::ostringstream& out, const std::vector<std::string>& line) {
    out << '|';
    for (std::size_t c = 0; c < line.size(); ++c) {
      out << ' ' << std::string(width[c] - display_width(line[c]), ' ') << line[c] << " |";
    }
    out << '\n';
  };
  std::ostringstream out;
  if (!title.empty()) out << "### " << title << "\n\n";
  emit(out, header);
  out << '|';
  for (std::size_t c = 0; c < header.size(); ++c) out << std::string(width[c] + 1, '-') << ":|";
  out << '\n';
  for (const auto& line : cells) emit(out, line);
  return out.str();
}

int study_thread_count(int requested, std::size_t tasks) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("DBC_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && v > 0) n = static_cast<int>(v);
    }
  }
  if (n <= 0) n = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  return std::max(1, std::min(n, static_cast<int>(std::max<std::size_t>(1, tasks))));
}

ConvergenceTable run_control_study(const ControlStudySpec& spec) {
  const StudyOptions& o = spec.study;
  validate_rows(o);
  if (o.reference_offset < 2) throw InvalidInput("reference mesh must be at least two rows finer than the finest row");
  const std::vector<std::string> selected = select_metrics(control_metric_names(), o.metrics);
  const int ref_row = o.finest_row + o.reference_offset;
  const MeshHierarchy hierarchy(spec.domain, passes_for_row(ref_row));

  const std::size_t n_rows = static_cast<std::size_t>(o.finest_row - o.coarsest_row + 1);
  std::vector<ControlSolution> solutions(n_rows + 1);
  const int threads = study_thread_count(o.threads, n_rows + 1);
  const FeSpace ref_space(hierarchy.at_row(ref_row), o.settings);
  // Task 0 is the reference solve, the most expensive one.
  parallel_for(n_rows + 1, threads, [&](std::size_t i) {
    if (i == 0) {
      solutions[0] = with_level_report(ref_row, [&] { return solve_control(spec.problem, ref_space, spec.control); });
      return;
    }
    const int row = o.coarsest_row + static_cast<int>(i) - 1;
    solutions[i] = with_level_report(row, [&] {
      const FeSpace space(hierarchy.at_row(row), o.settings);
      return solve_control(spec.problem, space, spec.control);
    });
  });

  const ControlSolution& ref = solutions[0];
  const TriMesh& ref_mesh = ref_space.mesh();
  const PolygonalDomain& domain = ref_mesh.domain();

  ConvergenceTable table;
  table.title = spec.domain + " control study";
  table.metrics = control_metric_names();
  table.reference_row = ref_row;
  const double lb = domain.lambda_bar();
  table.theory = {std::min(1.0, lb), std::min(1.5, lb) + 0.5, std::min(1.5, lb)};
  table.rows.resize(n_rows);

  parallel_for(n_rows, threads, [&](std::size_t i) {
    const int row = o.coarsest_row + static_cast<int>(i);
    const TriMesh& mesh = *hierarchy.at_row(row);
    const ControlSolution& sol = solutions[i + 1];
    FieldFunction e{prolongate(sol.u.values, mesh, ref_mesh)};
    for (std::size_t k = 0; k < e.values.size(); ++k) e.values[k] = ref.u.values[k] - e.values[k];
    const BoundaryFunction ez = trace(ref_mesh, e);
    ConvergenceRow& r = table.rows[i];
    r.row = row;
    r.h_sqrt2 = std::exp2(std::round(std::log2(mesh.h() * std::sqrt(2.0))));
    r.n_interior = mesh.n_interior_nodes();
    r.n_boundary = mesh.n_boundary_nodes();
    r.gmres_iterations = sol.gmres_iterations;
    r.errors = {h1_seminorm(ref_space.stiffness(), e), boundary_l2_norm(ref_space.boundary_mass(), ez),
                h_half_seminorm(ref_space, ez)};
  });
  fill_eoc(table, 0.0);
  return project_metrics(std::move(table), selected);
}

ConvergenceTable run_bvp_study(const BvpStudySpec& spec) {
  const StudyOptions& o = spec.study;
  validate_rows(o);
  if (!spec.exact.has_gradient()) throw InvalidInput("boundary value study needs the gradient of the exact solution");
  const std::vector<std::string> selected = select_metrics(bvp_metric_names(), o.metrics);
  const MeshHierarchy hierarchy(spec.domain, passes_for_row(o.finest_row));
  const PolygonalDomain& domain = hierarchy.at_passes(0)->domain();
  const EdgeFunction dn_exact = normal_derivative_of(spec.exact, domain);

  const std::size_t n_rows = static_cast<std::size_t>(o.finest_row - o.coarsest_row + 1);
  ConvergenceTable table;
  table.title = spec.domain + " boundary value study";
  table.metrics = bvp_metric_names();
  const double lb = domain.lambda_bar();
  table.theory = {std::min(1.5, lb), std::min(2.0, 2.0 * lb), std::min(1.0, lb), std::min(1.0, lb)};
  table.rows.resize(n_rows);

  parallel_for(n_rows, study_thread_count(o.threads, n_rows), [&](std::size_t i) {
    const int row = o.coarsest_row + static_cast<int>(i);
    with_level_report(row, [&] {
      const FeSpace space(hierarchy.at_row(row), o.settings);
      const TriMesh& mesh = space.mesh();
      const BoundaryFunction g = l2_projection(space, spec.exact);
      const Vector load = load_vector(mesh, spec.f);
      Vector rhs = space.gather_interior(load);
      const Vector aib_g = space.stiffness_ib().multiply(g.values);
      for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] -= aib_g[k];
      const FieldFunction y = space.combine(space.solve_interior(rhs), g.values);
      const BoundaryFunction dn = normal_derivative(space, y, load);
      const BoundaryFunction q = l2_projection(space, dn_exact);
      BoundaryFunction diff{dn.values};
      for (std::size_t k = 0; k < diff.values.size(); ++k) diff.values[k] -= q.values[k];

      ConvergenceRow& r = table.rows[i];
      r.row = row;
      r.h_sqrt2 = std::exp2(std::round(std::log2(mesh.h() * std::sqrt(2.0))));
      r.n_interior = mesh.n_interior_nodes();
      r.n_boundary = mesh.n_boundary_nodes();
      r.errors = {h_minus_half_norm(space, diff), l2_error(mesh, y, spec.exact), h1_error(mesh, y, spec.exact),
                  std::sqrt(mesh.h()) * boundary_l2_error(mesh, q, dn_exact)};
      return 0;
    });
  });
  // Errors at round-off level (exactly reproduced solutions) carry no rate.
  fill_eoc(table, 1e-12);
  return project_metrics(std::move(table), selected);
}

}  // namespace dbc
