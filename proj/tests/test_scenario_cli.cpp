#include "sweep/scenario.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

using namespace sweep;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = SWEEP_SCENARIO_DIR;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("sweep_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

RunOverrides quick(const fs::path& out) {
  RunOverrides o;
  o.max_level = 12;
  o.out_dir = out;
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SWEEP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kBallJson = R"({
  "name": "tiny",
  "dim": 2,
  "moving_set": {"horizon": 1, "segments": [
    {"from": 0, "to": 1, "shape": "ball", "params": {"center": [[0, 1], 0], "radius": 1}, "lipschitz": 1}]},
  "y0": [0, 0],
  "max_level": 10,
  "checks": ["constraint"]
})";

}  // namespace

TEST(Scenario, CorpusParses) {
  int count = 0;
  for (const auto& e : fs::directory_iterator(kScenarios)) {
    if (e.path().extension() != ".json") continue;
    const Scenario s = load_scenario(e.path());
    EXPECT_EQ(s.name, e.path().stem().string());
    EXPECT_EQ(s.y0.size(), s.dim);
    EXPECT_EQ(s.probes.size(), 5u);
    ++count;
  }
  EXPECT_GE(count, 10);
}

TEST(Scenario, FieldErrorsNameTheField) {
  Json j = Json::parse(kBallJson);
  j["moving_set"]["segments"][0]["params"]["radius"] = "wide";
  try {
    parse_scenario(j);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(e.where().find("radius"), std::string::npos) << e.where();
  }
  j = Json::parse(kBallJson);
  j["y0"] = Json::array({1, 2, 3});
  EXPECT_THROW(parse_scenario(j), ParseError);
  j = Json::parse(kBallJson);
  j["checks"] = Json::array({"bogus"});
  EXPECT_THROW(parse_scenario(j), ParseError);
}

TEST(Scenario, SyntaxErrorsCarryLineAndColumn) {
  try {
    parse_json("{\n  \"name\": \"x\",\n  oops\n}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(e.where().find("line 3"), std::string::npos) << e.where();
  }
}

TEST(Scenario, CheckListParsing) {
  EXPECT_EQ(parse_check_list("all"), all_check_names());
  EXPECT_TRUE(parse_check_list("none").empty());
  EXPECT_EQ(parse_check_list("constraint,variation"), (std::vector<std::string>{"constraint", "variation"}));
  EXPECT_THROW(parse_check_list("constraint,nope"), Error);
}

TEST(Run, MalformedFileGivesParseExitAndNoOutput) {
  TempDir tmp;
  const fs::path bad = tmp.path() / "bad.json";
  write(bad, "{\"name\": \"bad\", \"dim\": 2,,}");
  const fs::path out = tmp.path() / "out";
  const RunResult r = run_scenario_file(bad, quick(out));
  EXPECT_EQ(r.exit_code, kExitParseError);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(run_cli("run " + bad.string() + " --out " + out.string()), kExitParseError);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Run, WritesCsvCertificateAndSummary) {
  TempDir tmp;
  const RunResult r = run_scenario_file(kScenarios / "ramp.json", quick(tmp.path()));
  ASSERT_EQ(r.exit_code, kExitOk) << r.message;
  EXPECT_TRUE(fs::exists(r.csv_path));
  EXPECT_TRUE(fs::exists(r.certificate_path));
  EXPECT_TRUE(fs::exists(r.summary_path));
  const Json summary = read_json_file(r.summary_path);
  EXPECT_EQ(summary["name"], "ramp");
  EXPECT_EQ(summary["max_level"], 12);
  EXPECT_TRUE(summary["checks_passed"].get<bool>());
  const Trajectory y = read_trajectory_csv(r.csv_path);
  for (Eigen::Index j = 0; j < y.size(); ++j) EXPECT_NEAR(y.values(0, j), y.times[static_cast<std::size_t>(j)], 1e-12);
}

TEST(Run, CsvRoundTripPassesChecks) {
  TempDir tmp;
  for (const char* name : {"ball_jump.json", "two_sided_jump.json", "translating_ball.json"}) {
    const Scenario s = load_scenario(kScenarios / name);
    const RunResult r = run_scenario(s, quick(tmp.path()));
    ASSERT_EQ(r.exit_code, kExitOk) << r.message;
    const Trajectory y = read_trajectory_csv(r.csv_path);
    EXPECT_EQ(y.jumps.size(), s.moving_set.jumps().size());
    EXPECT_TRUE(check_constraint(y, s.moving_set).passed) << name;
    EXPECT_TRUE(check_jump_conditions(y, s.moving_set).passed) << name;
  }
}

TEST(Run, BallJumpRows) {
  TempDir tmp;
  const RunResult r = run_scenario_file(kScenarios / "ball_jump.json", quick(tmp.path()));
  ASSERT_EQ(r.exit_code, kExitOk) << r.message;
  std::istringstream csv(slurp(r.csv_path));
  std::string line;
  std::vector<std::string> jump_rows;
  while (std::getline(csv, line)) {
    if (line.find(",1,") != std::string::npos && line.rfind("1,", 0) == 0) jump_rows.push_back(line);
  }
  ASSERT_EQ(jump_rows.size(), 3u);
  EXPECT_EQ(jump_rows[0].substr(0, 7), "1,left,");
  EXPECT_EQ(jump_rows[1].substr(0, 5), "1,at,");
  EXPECT_EQ(jump_rows[2].substr(0, 8), "1,right,");
  const Trajectory y = read_trajectory_csv(r.csv_path);
  const JumpRecord* rec = y.jump_at(1);
  ASSERT_NE(rec, nullptr);
  EXPECT_LT((rec->at - (Vector(2) << 3, 0).finished()).norm(), 1e-9);
  EXPECT_NEAR(rec->ell_at, 4, 1e-12);
}

TEST(Run, DeterministicOutput) {
  TempDir a, b;
  const RunResult ra = run_scenario_file(kScenarios / "two_sided_jump.json", quick(a.path()));
  const RunResult rb = run_scenario_file(kScenarios / "two_sided_jump.json", quick(b.path()));
  ASSERT_EQ(ra.exit_code, kExitOk);
  EXPECT_EQ(slurp(ra.csv_path), slurp(rb.csv_path));
  EXPECT_EQ(slurp(ra.certificate_path), slurp(rb.certificate_path));
}

TEST(Run, OverridesWinOverScenarioWhichWinsOverEnvironment) {
  TempDir tmp;
  Json j = Json::parse(kBallJson);
  j["output"] = {{"dir", (tmp.path() / "from_file").string()}};
  const fs::path file = tmp.path() / "tiny.json";
  write(file, j.dump());

  ::setenv("SWEEP_OUT_DIR", (tmp.path() / "from_env").c_str(), 1);
  EXPECT_EQ(default_out_dir(), tmp.path() / "from_env");
  RunResult r = run_scenario_file(file);
  EXPECT_EQ(r.csv_path.parent_path(), tmp.path() / "from_file");

  RunOverrides o;
  o.out_dir = tmp.path() / "from_cli";
  o.target_tol = 1e-3;
  r = run_scenario_file(file, o);
  EXPECT_EQ(r.csv_path.parent_path(), tmp.path() / "from_cli");
  EXPECT_EQ(r.summary["target_tol"].get<Scalar>(), 1e-3);

  j.erase("output");
  write(file, j.dump());
  r = run_scenario_file(file);
  EXPECT_EQ(r.csv_path.parent_path(), tmp.path() / "from_env");
  ::unsetenv("SWEEP_OUT_DIR");
  EXPECT_EQ(default_out_dir(), fs::path("sweep_out"));
}

TEST(Run, SolverFailureGivesExitThreeAndNoOutput) {
  TempDir tmp;
  Json j = Json::parse(kBallJson);
  j["moving_set"]["segments"][0] = Json::parse(R"({"from": 0, "to": 1, "shape": "set", "lipschitz": 0,
    "params": {"base": {"type": "intersection", "witness": [0, 0], "max_iter": 1, "members": [
      {"type": "ball", "center": [0, 0.6], "radius": 1}, {"type": "ball", "center": [0, -0.6], "radius": 1}]}}})");
  j["y0"] = Json::array({3, 0.1});
  const RunResult r = run_scenario(parse_scenario(j), quick(tmp.path() / "out"));
  EXPECT_EQ(r.exit_code, kExitSolverError) << r.message;
  EXPECT_FALSE(fs::exists(tmp.path() / "out"));
}

TEST(Cli, RunAndSweepLevelsExitCodes) {
  TempDir tmp;
  const fs::path file = tmp.path() / "tiny.json";
  write(file, kBallJson);
  EXPECT_EQ(run_cli("run " + file.string() + " --out " + (tmp.path() / "o").string()), kExitOk);
  EXPECT_TRUE(fs::exists(tmp.path() / "o" / "tiny.csv"));
  EXPECT_EQ(run_cli("sweep-levels " + file.string() + " --from 4 --to 8"), kExitOk);
  EXPECT_EQ(run_cli("sweep-levels " + (tmp.path() / "missing.json").string() + " --from 4 --to 8"), kExitParseError);
  EXPECT_NE(run_cli("frobnicate"), kExitOk);
}

TEST(SweepLevels, TranslatingBallWithinBound) {
  const Scenario s = load_scenario(kScenarios / "translating_ball.json");
  const auto rows = sweep_levels(s, 6, 12);
  ASSERT_EQ(rows.size(), 7u);
  for (const auto& row : rows) {
    EXPECT_TRUE(row.ok);
    EXPECT_LE(row.observed, row.bound);
  }
  const std::string table = format_level_table(rows);
  EXPECT_EQ(table.substr(0, table.find('\n')), "n\tobserved\tbound\tok");
}

TEST(SweepLevels, ConstantSetHasZeroGaps) {
  Json j = Json::parse(kBallJson);
  j["moving_set"]["segments"][0]["params"]["center"] = Json::array({0, 0});
  j["moving_set"]["segments"][0]["lipschitz"] = 0;
  j["y0"] = Json::array({3, 4});
  for (const auto& row : sweep_levels(parse_scenario(j), 4, 8)) EXPECT_EQ(row.observed, 0);
  EXPECT_THROW(sweep_levels(load_scenario(kScenarios / "ball_jump.json"), 4, 6), InvalidInput);
}
