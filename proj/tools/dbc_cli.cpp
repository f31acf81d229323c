#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "dbc/config.hpp"
#include "dbc/error.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace dbc;

namespace {

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::invalid_input:
      return 2;
    case ErrorCategory::solver_failure:
      return 3;
    case ErrorCategory::config_error:
      return 4;
    case ErrorCategory::io_error:
      return 5;
  }
  return 1;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  std::ofstream out(dir / name);
  if (!out) throw IoError("cannot write '" + (dir / name).string() + "'");
  out.precision(17);
  return out;
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  return dir;
}

void cmd_domains() {
  std::printf("%-10s %-9s %-16s %-10s %s\n", "name", "vertices", "omega_max", "lambda_bar", "coordinates");
  for (const auto& name : builtin_domain_names()) {
    const PolygonalDomain d = builtin_domain(name);
    std::ostringstream coords;
    for (const Point& p : d.vertices()) coords << '(' << p.x << ',' << p.y << ") ";
    char omega[32];
    std::snprintf(omega, sizeof omega, "%.4f (%.2fpi)", d.omega_max(), d.omega_max() / std::numbers::pi);
    std::printf("%-10s %-9zu %-16s %-10.4f %s\n", name.c_str(), d.vertices().size(), omega, d.lambda_bar(),
                coords.str().c_str());
  }
}

void cmd_solve_control(const std::string& config_path, const std::string& out_dir) {
  const RunConfig config = load_config(config_path);
  if (config.kind != StudyKind::control) throw ConfigError("solve-control needs a control config (study.kind = \"control\")");
  const int row = config.level.value_or(config.finest_row);
  const fs::path dir = prepare_dir(out_dir);
  open_output(dir, "config.json") << config_to_json(config);

  const MeshHierarchy hierarchy(config.domain, passes_for_row(row));
  const FeSpace space(hierarchy.at_row(row), make_solver_settings(config));
  const ControlProblem problem = make_control_problem(config);
  const ControlSolution sol = solve_control(problem, space, make_control_options(config));
  const OptimalityResiduals res = optimality_residuals(space, problem, sol);

  {
    auto out = open_output(dir, "mesh.txt");
    write_mesh(out, space.mesh());
  }
  {
    auto out = open_output(dir, "fields.txt");
    out << "node x y u p\n";
    for (std::size_t i = 0; i < space.n_nodes(); ++i) {
      const Point p = space.mesh().node(static_cast<int>(i));
      out << i << ' ' << p.x << ' ' << p.y << ' ' << sol.u.values[i] << ' ' << sol.p.values[i] << '\n';
    }
  }
  {
    auto out = open_output(dir, "control.txt");
    out << "node x y z\n";
    const auto& bnodes = space.layout().boundary_nodes;
    for (std::size_t k = 0; k < bnodes.size(); ++k) {
      const Point p = space.mesh().node(bnodes[k]);
      out << bnodes[k] << ' ' << p.x << ' ' << p.y << ' ' << sol.z.values[k] << '\n';
    }
  }
  nlohmann::json summary{{"domain", config.domain},
                         {"level", row},
                         {"n_interior", space.n_interior()},
                         {"n_boundary", space.n_boundary()},
                         {"objective", sol.objective},
                         {"gmres_iterations", sol.gmres_iterations},
                         {"gmres_residual", sol.gmres_residual},
                         {"optimality_residual",
                          {{"state", res.state},
                           {"adjoint", res.adjoint},
                           {"gradient", res.gradient},
                           {"trace_mismatch", res.trace_mismatch},
                           {"max", res.max()}}}};
  open_output(dir, "summary.json") << summary.dump(2) << '\n';
  std::cout << summary.dump(2) << '\n';
}

void cmd_study(const std::string& preset_name, const std::string& config_path, const std::string& out_dir) {
  const RunConfig config = preset_name.empty() ? load_config(config_path) : preset(preset_name);
  const fs::path dir = prepare_dir(out_dir);
  open_output(dir, "config.json") << config_to_json(config);
  const ConvergenceTable table =
      config.kind == StudyKind::control ? run_control_study(make_control_study(config)) : run_bvp_study(make_bvp_study(config));
  open_output(dir, "table.csv") << table.to_csv();
  open_output(dir, "table.md") << table.to_markdown();
  std::cout << table.to_markdown();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet boundary control with energy regularization: P1 solver and convergence studies"};
  app.require_subcommand(1);

  app.add_subcommand("domains", "List builtin domains with largest angle and singular exponent");

  auto* solve = app.add_subcommand("solve-control", "Solve one discrete control problem");
  std::string solve_config;
  std::string solve_out;
  solve->add_option("--config", solve_config, "JSON config file")->required();
  solve->add_option("--out", solve_out, "Output directory")->required();

  auto* study = app.add_subcommand("study", "Run a convergence study and write CSV and Markdown tables");
  std::string study_preset;
  std::string study_config;
  std::string study_out;
  auto* preset_opt = study->add_option("--preset", study_preset, "Builtin preset")->check(CLI::IsMember(preset_names()));
  auto* config_opt = study->add_option("--config", study_config, "JSON config file");
  preset_opt->excludes(config_opt);
  study->add_option("--out", study_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("domains")) {
      cmd_domains();
    } else if (app.got_subcommand(solve)) {
      cmd_solve_control(solve_config, solve_out);
    } else if (app.got_subcommand(study)) {
      if (study_preset.empty() && study_config.empty()) throw ConfigError("study needs --preset or --config");
      cmd_study(study_preset, study_config, study_out);
    }
  } catch (const Error& e) {
    std::cerr << "error[" << category_name(e.category()) << "]: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
