#pragma once

#include "sweep/io.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sweep {

enum class SolverChoice { kAuto, kLipschitz, kBoundedRetraction };

/// Check names: constraint, jump_conditions, normal_cone, integral,
/// contraction, variation.
std::vector<std::string> all_check_names();

struct Scenario {
  std::string name;
  Eigen::Index dim = 0;
  MovingSet moving_set;
  Vector y0;
  SolveOptions solve;
  SolverChoice solver = SolverChoice::kAuto;
  std::vector<std::string> checks;
  /// Probe points w for the integral check and second initial conditions
  /// for the contraction check.
  std::vector<Vector> probes;
  std::optional<std::filesystem::path> out_dir;
};

/// Fields: name, dim, moving_set, y0, target_tol?, min_level?, max_level?,
/// solver? (auto | lipschitz | br), checks? ("all" | "none" | [names]),
/// probes?, output? {dir}.
Scenario parse_scenario(const Json& j);
Scenario load_scenario(const std::filesystem::path& path);

/// Command-line settings; each one present wins over the scenario file.
struct RunOverrides {
  std::optional<Scalar> target_tol;
  std::optional<int> max_level;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::vector<std::string>> checks;
};

/// Accepts "all", "none" or a comma-separated list of check names.
std::vector<std::string> parse_check_list(const std::string& text);

/// Default output directory: $SWEEP_OUT_DIR, else "sweep_out".
std::filesystem::path default_out_dir();

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitParseError = 2, kExitSolverError = 3 };

struct RunResult {
  int exit_code = kExitOk;
  std::string message;
  Trajectory trajectory;
  std::vector<CheckReport> reports;
  Json summary;
  std::filesystem::path csv_path;
  std::filesystem::path certificate_path;
  std::filesystem::path summary_path;
};

/// Solves, verifies and writes <name>.csv, <name>.certificate.json and
/// <name>.summary.json. Nothing is written when solving fails.
RunResult run_scenario(const Scenario& s, const RunOverrides& overrides = {});
/// Parse failures give kExitParseError and write nothing.
RunResult run_scenario_file(const std::filesystem::path& path, const RunOverrides& overrides = {});

struct LevelRow {
  int level;
  Scalar observed;
  Scalar bound;
  bool ok;
};

/// Dyadic gaps between levels n and n+1 for n in [from, to].
std::vector<LevelRow> sweep_levels(const Scenario& s, int from, int to);
std::string format_level_table(const std::vector<LevelRow>& rows);

}  // namespace sweep
