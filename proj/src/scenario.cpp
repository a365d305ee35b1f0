#include "sweep/scenario.hpp"

#include <algorithm>
#include <cstdlib>
#include <memory>
#include <sstream>

namespace sweep {

namespace {

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"constraint", "jump_conditions", "normal_cone",
                                              "integral",   "contraction",     "variation"};
  return names;
}

std::vector<std::string> checks_from_json(const Json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return parse_check_list(j.get<std::string>());
    } catch (const InvalidInput& e) {
      throw ParseError(path, e.what());
    }
  }
  if (!j.is_array()) throw ParseError(path, "expected \"all\", \"none\" or an array of check names");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = path + "/" + std::to_string(i);
    if (!j[i].is_string()) throw ParseError(where, "expected a check name");
    const auto name = j[i].get<std::string>();
    if (std::find(check_names().begin(), check_names().end(), name) == check_names().end()) {
      throw ParseError(where, "unknown check '" + name + "'");
    }
    out.push_back(name);
  }
  return out;
}

bool wants(const std::vector<std::string>& checks, const std::string& name) {
  return std::find(checks.begin(), checks.end(), name) != checks.end();
}

CheckReport variation_report(const Trajectory& y, Scalar budget, Scalar tol) {
  CheckReport r;
  r.name = "variation";
  r.tolerance = tol;
  const Scalar v = variation(y);
  r.residual = v - budget;
  r.location = y.times.empty() ? 0 : y.times.back();
  r.passed = r.residual <= tol;
  r.detail = "variation " + format_scalar(v) + ", budget " + format_scalar(budget);
  return r;
}

}  // namespace

std::vector<std::string> all_check_names() { return check_names(); }

std::vector<std::string> parse_check_list(const std::string& text) {
  if (text == "all") return check_names();
  if (text == "none" || text.empty()) return {};
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string name;
  while (std::getline(in, name, ',')) {
    if (name.empty()) continue;
    if (std::find(check_names().begin(), check_names().end(), name) == check_names().end()) {
      throw InvalidInput("unknown check '" + name + "'");
    }
    out.push_back(name);
  }
  return out;
}

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("SWEEP_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "sweep_out";
}

Scenario parse_scenario(const Json& j) {
  if (!j.is_object()) throw ParseError("/", "expected an object");
  auto need = [&](const char* key) -> const Json& {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("/") + key, "missing field");
    return *it;
  };
  const Json& name = need("name");
  if (!name.is_string() || name.get<std::string>().empty()) throw ParseError("/name", "expected a nonempty string");
  const Json& dim = need("dim");
  if (!dim.is_number_integer() || dim.get<long>() <= 0) throw ParseError("/dim", "expected a positive integer");

  Scenario s{name.get<std::string>(), dim.get<Eigen::Index>(), parse_moving_set(need("moving_set"), "/moving_set"),
             parse_vector(need("y0"), "/y0"), SolveOptions{}, SolverChoice::kAuto, {}, {}, std::nullopt};
  if (s.moving_set.dim() != s.dim) throw ParseError("/moving_set", "dimension does not match dim");
  if (s.y0.size() != s.dim) throw ParseError("/y0", "dimension does not match dim");

  if (auto it = j.find("target_tol"); it != j.end()) {
    if (!it->is_number() || !(it->get<Scalar>() > 0)) throw ParseError("/target_tol", "expected a positive number");
    s.solve.target_tol = it->get<Scalar>();
  }
  if (auto it = j.find("min_level"); it != j.end()) {
    if (!it->is_number_integer()) throw ParseError("/min_level", "expected an integer");
    s.solve.min_level = it->get<int>();
  }
  if (auto it = j.find("max_level"); it != j.end()) {
    if (!it->is_number_integer()) throw ParseError("/max_level", "expected an integer");
    s.solve.max_level = it->get<int>();
  }
  if (s.solve.min_level < 0 || s.solve.max_level < s.solve.min_level) {
    throw ParseError("/max_level", "levels must satisfy 0 <= min_level <= max_level");
  }
  if (auto it = j.find("solver"); it != j.end()) {
    const std::string v = it->is_string() ? it->get<std::string>() : "";
    if (v == "auto") {
      s.solver = SolverChoice::kAuto;
    } else if (v == "lipschitz") {
      s.solver = SolverChoice::kLipschitz;
    } else if (v == "br") {
      s.solver = SolverChoice::kBoundedRetraction;
    } else {
      throw ParseError("/solver", "expected \"auto\", \"lipschitz\" or \"br\"");
    }
  }
  if (s.solver == SolverChoice::kLipschitz && s.moving_set.has_jumps()) {
    throw ParseError("/solver", "the Lipschitz solver cannot handle jumps");
  }
  s.checks = check_names();
  if (auto it = j.find("checks"); it != j.end()) s.checks = checks_from_json(*it, "/checks");
  if (auto it = j.find("probes"); it != j.end()) {
    if (!it->is_array()) throw ParseError("/probes", "expected an array of points");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string where = "/probes/" + std::to_string(i);
      Vector w = parse_vector((*it)[i], where);
      if (w.size() != s.dim) throw ParseError(where, "dimension does not match dim");
      s.probes.push_back(std::move(w));
    }
  }
  if (auto it = j.find("output"); it != j.end()) {
    if (!it->is_object()) throw ParseError("/output", "expected an object");
    if (auto d = it->find("dir"); d != it->end()) {
      if (!d->is_string()) throw ParseError("/output/dir", "expected a string");
      s.out_dir = d->get<std::string>();
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  try {
    return parse_scenario(read_json_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

RunResult run_scenario(const Scenario& s, const RunOverrides& overrides) {
  RunResult result;
  SolveOptions opts = s.solve;
  if (overrides.target_tol) opts.target_tol = *overrides.target_tol;
  if (overrides.max_level) opts.max_level = std::max(*overrides.max_level, opts.min_level);
  const std::vector<std::string> checks = overrides.checks ? *overrides.checks : s.checks;
  const std::filesystem::path out_dir = overrides.out_dir ? *overrides.out_dir : s.out_dir ? *s.out_dir : default_out_dir();
  const bool use_br = s.solver == SolverChoice::kBoundedRetraction ||
                      (s.solver == SolverChoice::kAuto && s.moving_set.has_jumps());

  std::unique_ptr<Reparametrization> reparam;
  Trajectory& y = result.trajectory;
  try {
    if (use_br) {
      reparam = std::make_unique<Reparametrization>(s.moving_set);
      y = solve_br_full(*reparam, s.y0, opts).trajectory;
    } else {
      y = solve_lipschitz(s.moving_set, s.y0, opts);
    }
  } catch (const Error& e) {
    result.exit_code = kExitSolverError;
    result.message = s.name + ": solver failed: " + e.what();
    return result;
  }

  const Scalar horizon = s.moving_set.horizon();
  const Scalar ell_total = y.ell.empty() ? 0 : y.ell.back();
  const std::vector<Vector> probes = s.probes.empty() ? std::vector<Vector>{s.y0} : s.probes;
  std::vector<std::string> skipped;
  try {
    if (wants(checks, "constraint")) result.reports.push_back(check_constraint(y, s.moving_set));
    if (wants(checks, "jump_conditions")) result.reports.push_back(check_jump_conditions(y, s.moving_set));
    if (wants(checks, "normal_cone")) result.reports.push_back(check_normal_cone_residuals(y, s.moving_set));
    if (wants(checks, "integral")) {
      if (s.moving_set.has_jumps()) {
        skipped.push_back("integral");
      } else {
        result.reports.push_back(check_integral_inequality(y, s.moving_set, probes));
      }
    }
    if (wants(checks, "contraction")) {
      const int level = std::min(10, opts.max_level);
      std::unique_ptr<SetCurve> curve;
      if (reparam) {
        curve = std::make_unique<Reparametrization>(*reparam);
      } else {
        curve = std::make_unique<MovingSetCurve>(s.moving_set);
      }
      const DiscreteTrajectory base = catching_up(*curve, s.y0, level);
      CheckReport worst;
      worst.name = "contraction";
      worst.tolerance = 1e-12;
      for (const Vector& w : probes) {
        const CheckReport r = check_contraction(base, catching_up(*curve, w, level));
        if (r.residual >= worst.residual) worst = r;
      }
      worst.passed = worst.residual <= worst.tolerance;
      result.reports.push_back(worst);
    }
    if (wants(checks, "variation")) {
      const Scalar budget = use_br ? ell_total : s.moving_set.max_lipschitz() * horizon;
      result.reports.push_back(variation_report(y, budget, 1e-6));
    }
  } catch (const Error& e) {
    result.exit_code = kExitSolverError;
    result.message = s.name + ": check failed to run: " + e.what();
    return result;
  }

  bool all_passed = true;
  Json certificate = Json::array();
  for (const auto& r : result.reports) {
    all_passed = all_passed && r.passed;
    certificate.push_back(to_json(r));
  }

  Json history = Json::array();
  for (const auto& g : y.stats.history) history.push_back(to_json(g));
  Json& summary = result.summary;
  summary = {{"name", s.name},
             {"solver", use_br ? "br" : "lipschitz"},
             {"horizon", horizon},
             {"level", y.stats.level},
             {"final_gap", y.stats.final_gap},
             {"converged", y.stats.converged},
             {"time_scale", y.stats.time_scale},
             {"target_tol", opts.target_tol},
             {"max_level", opts.max_level},
             {"nodes", y.size()},
             {"jumps", y.jumps.size()},
             {"ell_total", ell_total},
             {"variation", variation(y)},
             {"initial_displacement", y.initial_displacement.norm()},
             {"history", history},
             {"checks_passed", all_passed},
             {"skipped_checks", skipped}};

  result.csv_path = out_dir / (s.name + ".csv");
  result.certificate_path = out_dir / (s.name + ".certificate.json");
  result.summary_path = out_dir / (s.name + ".summary.json");
  try {
    write_file_atomic(result.csv_path, trajectory_csv(y));
    write_file_atomic(result.certificate_path, certificate.dump(2) + "\n");
    write_file_atomic(result.summary_path, summary.dump(2) + "\n");
  } catch (const std::exception& e) {
    result.exit_code = kExitSolverError;
    result.message = s.name + ": cannot write output: " + e.what();
    return result;
  }

  if (!all_passed) {
    result.exit_code = kExitCheckFailed;
    std::string failed;
    for (const auto& r : result.reports) {
      if (!r.passed) failed += (failed.empty() ? "" : ", ") + r.name;
    }
    result.message = s.name + ": failed checks: " + failed;
  } else {
    result.message = s.name + ": ok (level " + std::to_string(y.stats.level) + ", gap " +
                     format_scalar(y.stats.final_gap) + ")";
  }
  return result;
}

RunResult run_scenario_file(const std::filesystem::path& path, const RunOverrides& overrides) {
  std::optional<Scenario> s;
  try {
    s = load_scenario(path);
  } catch (const ParseError& e) {
    RunResult result;
    result.exit_code = kExitParseError;
    result.message = std::string("parse error: ") + e.what();
    return result;
  }
  return run_scenario(*s, overrides);
}

std::vector<LevelRow> sweep_levels(const Scenario& s, int from, int to) {
  if (s.moving_set.has_jumps()) throw InvalidInput("sweep-levels needs a scenario without jumps");
  if (from < 0 || to < from) throw InvalidInput("sweep-levels: need 0 <= from <= to");
  const MovingSetCurve curve(s.moving_set);
  std::vector<LevelRow> rows;
  DiscreteTrajectory coarse = catching_up(curve, s.y0, from);
  for (int n = from; n <= to; ++n) {
    DiscreteTrajectory fine = catching_up(curve, s.y0, n + 1);
    const LevelGap g = compare_levels(coarse, fine);
    rows.push_back({n, g.gap, g.bound, g.within_bound});
    coarse = std::move(fine);
  }
  return rows;
}

std::string format_level_table(const std::vector<LevelRow>& rows) {
  std::ostringstream out;
  out << "n\tobserved\tbound\tok\n";
  for (const auto& r : rows) {
    out << r.level << '\t' << format_scalar(r.observed) << '\t' << format_scalar(r.bound) << '\t'
        << (r.ok ? "yes" : "NO") << '\n';
  }
  return out.str();
}

}  // namespace sweep
