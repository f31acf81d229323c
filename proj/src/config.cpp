#include "dbc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "dbc/error.hpp"
#include "dbc/functions.hpp"
#include "json.hpp"

namespace dbc {

using nlohmann::json;

namespace {

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("unknown field '" + (where.empty() ? "" : where + ".") + item.key() + "'");
    }
  }
}

template <class T>
T get_field(const json& obj, const std::string& key, const std::string& name) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + name + "' has the wrong type");
  }
}

template <class T>
void read_opt(const json& obj, const std::string& key, const std::string& name, T& out) {
  if (obj.contains(key)) out = get_field<T>(obj, key, name);
}

std::string function_field(const json& obj, const std::string& key) {
  const json& v = obj.at(key);
  if (v.is_number()) {
    std::ostringstream s;
    s.precision(17);
    s << v.get<double>();
    return s.str();
  }
  if (!v.is_string()) throw ConfigError("field '" + key + "' must be an expression string or a number");
  return v.get<std::string>();
}

void validate(const RunConfig& c) {
  if (c.domain.empty()) throw ConfigError("missing field 'domain'");
  const auto names = builtin_domain_names();
  if (std::find(names.begin(), names.end(), c.domain) == names.end()) {
    throw ConfigError("field 'domain': unknown domain '" + c.domain + "'");
  }
  if (c.coarsest_row < 0) throw ConfigError("field 'levels.coarsest' must be non-negative");
  if (c.finest_row < c.coarsest_row) throw ConfigError("field 'levels': empty level range");
  if (c.level && *c.level < 0) throw ConfigError("field 'level' must be non-negative");
  if (c.reference_offset < 2) throw ConfigError("field 'reference_offset' must be at least 2");
  if (c.kind == StudyKind::control) {
    if (!c.nu) throw ConfigError("missing field 'nu'");
    if (!(*c.nu > 0.0)) throw ConfigError("field 'nu' must be positive");
  } else if (c.exact.empty()) {
    throw ConfigError("missing field 'study.exact' for a boundary value study");
  }
  if (!(c.solver.gmres_tol > 0.0)) throw ConfigError("field 'solver.gmres_tol' must be positive");
  if (c.solver.restart < 1) throw ConfigError("field 'solver.restart' must be positive");
  if (c.solver.max_outer < 1) throw ConfigError("field 'solver.max_outer' must be positive");
  if (!(c.solver.cg_tol > 0.0)) throw ConfigError("field 'solver.cg_tol' must be positive");
  if (c.solver.linear != "cholesky" && c.solver.linear != "cg") {
    throw ConfigError("field 'solver.linear' must be \"cholesky\" or \"cg\"");
  }
  if (c.threads < 0) throw ConfigError("field 'threads' must be non-negative");
  const auto all = c.kind == StudyKind::control ? control_metric_names() : bvp_metric_names();
  for (const auto& m : c.metrics) {
    if (std::find(all.begin(), all.end(), m) == all.end()) throw ConfigError("field 'study.metrics': unknown metric '" + m + "'");
  }
  for (const auto* expr : {&c.f, &c.u_d}) make_function(*expr);
  if (!c.exact.empty()) make_function(c.exact);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed config at " + line_column(text, e.byte) + ": " + e.what());
  }
  check_keys(j, "", {"domain", "levels", "level", "reference_offset", "nu", "f", "u_d", "solver", "study", "threads"});
  RunConfig c;
  read_opt(j, "domain", "domain", c.domain);
  if (j.contains("levels")) {
    const json& l = j.at("levels");
    check_keys(l, "levels", {"coarsest", "finest"});
    if (!l.contains("coarsest") || !l.contains("finest")) throw ConfigError("field 'levels' needs 'coarsest' and 'finest'");
    c.coarsest_row = get_field<int>(l, "coarsest", "levels.coarsest");
    c.finest_row = get_field<int>(l, "finest", "levels.finest");
  }
  if (j.contains("level")) c.level = get_field<int>(j, "level", "level");
  read_opt(j, "reference_offset", "reference_offset", c.reference_offset);
  if (j.contains("nu")) c.nu = get_field<double>(j, "nu", "nu");
  if (j.contains("f")) c.f = function_field(j, "f");
  if (j.contains("u_d")) c.u_d = function_field(j, "u_d");
  read_opt(j, "threads", "threads", c.threads);
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, "solver", {"gmres_tol", "restart", "max_outer", "cg_tol", "linear"});
    read_opt(s, "gmres_tol", "solver.gmres_tol", c.solver.gmres_tol);
    read_opt(s, "restart", "solver.restart", c.solver.restart);
    read_opt(s, "max_outer", "solver.max_outer", c.solver.max_outer);
    read_opt(s, "cg_tol", "solver.cg_tol", c.solver.cg_tol);
    read_opt(s, "linear", "solver.linear", c.solver.linear);
  }
  if (j.contains("study")) {
    const json& s = j.at("study");
    check_keys(s, "study", {"kind", "metrics", "exact"});
    std::string kind = "control";
    read_opt(s, "kind", "study.kind", kind);
    if (kind == "control") {
      c.kind = StudyKind::control;
    } else if (kind == "bvp") {
      c.kind = StudyKind::bvp;
    } else {
      throw ConfigError("field 'study.kind' must be \"control\" or \"bvp\"");
    }
    read_opt(s, "metrics", "study.metrics", c.metrics);
    if (s.contains("exact")) c.exact = function_field(s, "exact");
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["domain"] = c.domain;
  j["levels"] = {{"coarsest", c.coarsest_row}, {"finest", c.finest_row}};
  if (c.level) j["level"] = *c.level;
  j["reference_offset"] = c.reference_offset;
  if (c.nu) j["nu"] = *c.nu;
  j["f"] = c.f;
  j["u_d"] = c.u_d;
  j["threads"] = c.threads;
  j["solver"] = {{"gmres_tol", c.solver.gmres_tol},
                 {"restart", c.solver.restart},
                 {"max_outer", c.solver.max_outer},
                 {"cg_tol", c.solver.cg_tol},
                 {"linear", c.solver.linear}};
  json study;
  study["kind"] = c.kind == StudyKind::control ? "control" : "bvp";
  study["metrics"] = c.metrics.empty() ? (c.kind == StudyKind::control ? control_metric_names() : bvp_metric_names())
                                       : c.metrics;
  if (!c.exact.empty()) study["exact"] = c.exact;
  j["study"] = study;
  return j.dump(2) + "\n";
}

std::vector<std::string> preset_names() { return {"table1", "table2", "table3"}; }

RunConfig preset(const std::string& name) {
  std::string domain;
  if (name == "table1") {
    domain = "omega90";
  } else if (name == "table2") {
    domain = "omega135";
  } else if (name == "table3") {
    domain = "omega270";
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  RunConfig c;
  c.domain = domain;
  c.coarsest_row = 3;
  c.finest_row = 7;
  c.reference_offset = 2;
  c.nu = 1.0;
  c.f = "0";
  c.u_d = "x + y";
  return c;
}

SolverSettings make_solver_settings(const RunConfig& c) {
  SolverSettings s;
  s.method = c.solver.linear == "cg" ? SpdMethod::jacobi_cg : SpdMethod::cholesky;
  s.cg_tol = c.solver.cg_tol;
  return s;
}

ControlProblem make_control_problem(const RunConfig& c) {
  if (!c.nu) throw ConfigError("missing field 'nu'");
  ControlProblem p;
  p.nu = *c.nu;
  p.f = make_function(c.f);
  p.u_d = make_function(c.u_d);
  return p;
}

ControlOptions make_control_options(const RunConfig& c) {
  ControlOptions o;
  o.gmres.rel_tol = c.solver.gmres_tol;
  o.gmres.restart = c.solver.restart;
  o.gmres.max_outer = c.solver.max_outer;
  return o;
}

StudyOptions make_study_options(const RunConfig& c) {
  StudyOptions o;
  o.coarsest_row = c.coarsest_row;
  o.finest_row = c.finest_row;
  o.reference_offset = c.reference_offset;
  o.metrics = c.metrics;
  o.settings = make_solver_settings(c);
  o.threads = c.threads;
  return o;
}

ControlStudySpec make_control_study(const RunConfig& c) {
  return {c.domain, make_control_problem(c), make_control_options(c), make_study_options(c)};
}

BvpStudySpec make_bvp_study(const RunConfig& c) {
  BvpStudySpec s;
  s.domain = c.domain;
  s.exact = make_function(c.exact);
  s.f = make_function(c.f);
  s.study = make_study_options(c);
  return s;
}

}  // namespace dbc
