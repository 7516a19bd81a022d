#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

using namespace decoy;
namespace fs = std::filesystem;

namespace {

const std::string kCaseStudy = std::string(DECOY_SOURCE_DIR) + "/data/case_study.cfg";

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("decoy_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, '\t');) out.push_back(cell);
  return out;
}

// Small one-threat scenario with a feasible plan, written as a config file.
std::string pair_config(const std::string& name, std::uint64_t seed, int steps) {
  std::mt19937_64 rng(seed);
  Scenario s;
  do {
    s = testsupport::pair_scenario(rng, steps);
  } while (!plan_all(s, allocate(s), {}).at(0).ok());
  s.episode_time = 40.0;
  const fs::path path = fs::temp_directory_path() / ("decoy_cli_" + name + ".cfg");
  spit(path, render_config(s));
  return path.string();
}

CommandOptions options_for(const std::string& scenario, const fs::path& out) {
  CommandOptions o;
  o.scenario_path = scenario;
  o.out_dir = out.string();
  return o;
}

// Overwrites one cell of trajectories.tsv.
void edit_trajectory(const fs::path& dir, int step, const std::string& column, double value) {
  std::vector<std::string> lines = lines_of(slurp(dir / "trajectories.tsv"));
  std::size_t header = 0;
  while (lines[header].rfind("#", 0) == 0) ++header;
  const std::vector<std::string> cols = split_tabs(lines[header]);
  const auto col = std::find(cols.begin(), cols.end(), column) - cols.begin();
  REQUIRE(col < static_cast<long>(cols.size()));
  std::vector<std::string> cells = split_tabs(lines[header + 1 + step]);
  REQUIRE(std::stoi(cells[0]) == step);
  cells[col] = std::to_string(value);
  std::string row;
  for (std::size_t c = 0; c < cells.size(); ++c) row += (c ? "\t" : "") + cells[c];
  lines[header + 1 + step] = row;
  std::string text;
  for (const std::string& l : lines) text += l + "\n";
  spit(dir / "trajectories.tsv", text);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DECOYPLAN_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("assign prints the sequential assignment table") {
  const fs::path out = fresh_dir("assign");
  std::ostringstream text;
  REQUIRE(cmd_assign(options_for(kCaseStudy, out), text) == 0);
  const std::vector<std::string> lines = lines_of(slurp(out / "assignment.txt"));
  CHECK(text.str() == slurp(out / "assignment.txt"));
  REQUIRE(lines.size() == 8u);
  CHECK(lines[0] == "decoy\tthreat\torder\tdistance_m\tmargin_m\tsaturation_m\testimated_s");
  for (int r = 1; r <= 6; ++r) {
    const std::vector<std::string> cells = split_tabs(lines[r]);
    REQUIRE(cells.size() == 7u);
    CHECK(std::stoi(cells[2]) == r);
    CHECK(std::stod(cells[6]) == doctest::Approx(std::stod(cells[3]) / 39.0 + 2.0).epsilon(0.002));
  }
  CHECK(lines[7].find("unassigned decoys 6 7") != std::string::npos);
  for (const char* f : {"manifest.json", "scenario.cfg"}) CHECK(fs::exists(out / f));
}

TEST_CASE("single pair reports an infinite margin") {
  const std::string cfg = R"([asset]
position = [0, 0, 0]
[threats]
positions = [[-20000, 0, 3000]]
speed = [274]
jamming_constant = [105]
[decoys]
positions = [[-2500, 300, 100]]
)";
  const fs::path path = fs::temp_directory_path() / "decoy_cli_single.cfg";
  spit(path, cfg);
  const fs::path out = fresh_dir("single");
  std::ostringstream text;
  REQUIRE(cmd_assign(options_for(path.string(), out), text) == 0);
  const std::vector<std::string> lines = lines_of(text.str());
  REQUIRE(lines.size() >= 2u);
  CHECK(split_tabs(lines[1]).at(4) == "inf");
}

TEST_CASE("planning is deterministic") {
  const std::string cfg = pair_config("determinism", 5, 10);
  std::string first_plans, first_table;
  for (int run = 0; run < 2; ++run) {
    const fs::path out = fresh_dir("plan" + std::to_string(run));
    CommandOptions o = options_for(cfg, out);
    o.write_lp = true;
    std::ostringstream text;
    REQUIRE(cmd_plan(o, text) == 0);
    const std::string plans = slurp(out / "plans.json");
    const std::string table = slurp(out / "plan.txt");
    if (run == 0) {
      first_plans = plans;
      first_table = table;
      bool any_lp = false;
      for (const auto& entry : fs::directory_iterator(out)) {
        any_lp = any_lp || entry.path().extension() == ".lp";
      }
      CHECK(any_lp);
    } else {
      CHECK(plans == first_plans);
      CHECK(table == first_table);
    }
  }
  // Plans survive a JSON round trip.
  const std::vector<DecoyPlan> plans = plans_from_json(first_plans);
  REQUIRE(!plans.empty());
  CHECK(plans_to_json(plans, load_scenario(options_for(cfg, "")).params) == first_plans);
}

TEST_CASE("verify accepts simulated runs and flags edited logs") {
  const std::string cfg = pair_config("verify", 7, 10);
  const fs::path plan_dir = fresh_dir("verify_plan");
  std::ostringstream sink;
  REQUIRE(cmd_plan(options_for(cfg, plan_dir), sink) == 0);

  const fs::path sim_dir = fresh_dir("verify_sim");
  CommandOptions o = options_for(cfg, sim_dir);
  o.plans_path = (plan_dir / "plans.json").string();
  REQUIRE(cmd_simulate(o, sink) == 0);
  VerifyReport rep = verify_run(sim_dir.string());
  CHECK(rep.ok());
  CHECK(rep.passed.size() >= 4u);
  std::ostringstream text;
  CHECK(cmd_verify(sim_dir.string(), text) == 0);
  CHECK(text.str().find("verify: all checks passed") != std::string::npos);

  const std::string pristine = slurp(sim_dir / "trajectories.tsv");
  const int decoy = plans_from_json(slurp(plan_dir / "plans.json")).at(0).decoy;
  const std::string px = "d" + std::to_string(decoy) + "_px";

  SUBCASE("position outside the safe set") {
    edit_trajectory(sim_dir, 2, px, 1e6);
    rep = verify_run(sim_dir.string());
    CHECK_FALSE(rep.ok());
    bool named = false;
    for (const std::string& f : rep.failed) {
      named = named || f.find("outside its safe set at step 2") != std::string::npos;
    }
    CHECK(named);
    std::ostringstream fail_text;
    CHECK(cmd_verify(sim_dir.string(), fail_text) == 1);
  }
  SUBCASE("Doppler band broken at the final step") {
    // Fly straight at the threat: far outside the Doppler tolerance.
    const Table table = parse_table(pristine);
    const std::size_t final_row = table.rows.size() - 1;
    const Vec3 zdot(table.at(final_row, "t0_vx"), table.at(final_row, "t0_vy"),
                    table.at(final_row, "t0_vz"));
    const Vec3 v = -39.0 * zdot.normalized();
    const std::string prefix = "d" + std::to_string(decoy) + "_v";
    const int step = static_cast<int>(table.at(final_row, "step"));
    edit_trajectory(sim_dir, step, prefix + "x", v(0));
    edit_trajectory(sim_dir, step, prefix + "y", v(1));
    edit_trajectory(sim_dir, step, prefix + "z", v(2));
    rep = verify_run(sim_dir.string());
    bool phi = false;
    for (const std::string& f : rep.failed) phi = phi || f.find("phi_pos violated") != std::string::npos;
    CHECK(phi);
  }
  spit(sim_dir / "trajectories.tsv", pristine);
  CHECK(verify_run(sim_dir.string()).ok());
}

TEST_CASE("command-line exit codes") {
  const fs::path out = fresh_dir("exit");
  CHECK(run_cli("assign --scenario " + kCaseStudy + " --out " + out.string()) == 0);
  // Open-loop simulation without plans is a usage error.
  CHECK(run_cli("simulate --scenario " + kCaseStudy + " --out " + out.string()) == 2);
  CHECK(run_cli("assign --scenario /nonexistent.cfg --out " + out.string()) == 1);
  CHECK(run_cli("assign --out " + out.string()) != 0);
  CHECK(run_cli("frobnicate") != 0);
}
