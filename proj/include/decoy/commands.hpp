#ifndef DECOY_COMMANDS_HPP
#define DECOY_COMMANDS_HPP

#include "decoy/sim.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace decoy {

struct CommandOptions {
  std::string scenario_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon_steps;
  SolverOptions solver;
  std::string mode = "open";  // simulate: open | closed
  std::string plans_path;     // simulate --mode open
  bool write_lp = false;
  bool disturbances = true;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

/// Record of one command invocation; the only output that carries timings.
struct RunManifest {
  std::string scenario_path;
  std::string command;
  std::string solver;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::vector<StageTiming> timings;
  std::vector<std::string> files;

  std::string to_json() const;
};

/// Loads the scenario and applies command-line overrides.
Scenario load_scenario(const CommandOptions& options);

/// Table of the sequential assignment: decoy, threat, order, distance,
/// margin, saturation and estimated positioning time.
std::string assignment_report(const Scenario& scenario, const AllocationReport& alloc);

/// Assignment columns extended with the optimised positioning times.
std::string plan_report(const Scenario& scenario, const AllocationReport& alloc,
                        const std::vector<DecoyPlan>& plans);

std::string plans_to_json(const std::vector<DecoyPlan>& plans, const PlanningParams& params);
std::vector<DecoyPlan> plans_from_json(const std::string& text);

std::string trajectories_tsv(const SimResult& result);
std::string metrics_report(const Scenario& scenario, const AllocationReport& alloc,
                           const SimResult& result);

/// Numeric table with a header row; "nan" cells parse as NaN.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // throws Io when missing
  double at(std::size_t row, const std::string& name) const;
};
Table parse_table(const std::string& text);

/// Rebuilds the logged run of a directory written by cmd_simulate.
SimResult load_trajectories(const Scenario& scenario, const AllocationReport& alloc,
                            const Table& table);

struct VerifyReport {
  std::vector<std::string> passed;
  std::vector<std::string> failed;
  bool ok() const { return failed.empty(); }
};

/// Checks a run directory: positioning formula and completion steps on the
/// logged states, safe sets and separation, and auxiliary variable counts.
VerifyReport verify_run(const std::string& run_dir);

/// Subcommands. Each writes its files plus manifest.json and scenario.cfg to
/// the output directory and a summary to `out`; the return value is the
/// process exit code.
int cmd_assign(const CommandOptions& options, std::ostream& out);
int cmd_plan(const CommandOptions& options, std::ostream& out);
int cmd_simulate(const CommandOptions& options, std::ostream& out);
int cmd_verify(const std::string& run_dir, std::ostream& out);

}  // namespace decoy

#endif  // DECOY_COMMANDS_HPP
