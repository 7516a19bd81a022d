#include "decoy/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

void add_common(CLI::App* cmd, decoy::CommandOptions& opts, std::string& solver,
                std::optional<std::uint64_t>& seed, std::optional<int>& horizon) {
  cmd->add_option("--scenario", opts.scenario_path, "scenario configuration file")->required();
  cmd->add_option("--out", opts.out_dir, "output directory")->required();
  cmd->add_option("--seed", seed, "override the scenario seed");
  cmd->add_option("--horizon-steps", horizon, "override the planning horizon N");
  cmd->add_option("--solver", solver, "builtin or external")
      ->check(CLI::IsMember({"builtin", "external"}));
  cmd->add_option("--time-limit", opts.solver.limits.time_seconds,
                  "per-problem solver time limit [s]");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoy allocation, positioning and simulation"};
  app.require_subcommand(1);
  decoy::CommandOptions opts;
  std::string solver = "builtin";
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;
  std::string run_dir;
  bool no_disturbance = false;

  auto* assign = app.add_subcommand("assign", "targets, weights and sequential assignment");
  add_common(assign, opts, solver, seed, horizon);
  auto* plan = app.add_subcommand("plan", "solve the step-0 positioning problems");
  add_common(plan, opts, solver, seed, horizon);
  plan->add_flag("--write-lp", opts.write_lp, "also emit each problem in LP format");
  auto* simulate = app.add_subcommand("simulate", "open- or closed-loop simulation");
  add_common(simulate, opts, solver, seed, horizon);
  simulate->add_option("--mode", opts.mode, "open or closed")
      ->check(CLI::IsMember({"open", "closed"}));
  simulate->add_option("--plans", opts.plans_path, "plans.json from 'plan' (open mode)");
  simulate->add_flag("--no-disturbance", no_disturbance, "simulate without disturbances");
  auto* verify = app.add_subcommand("verify", "re-check a simulation run directory");
  verify->add_option("run_dir", run_dir, "directory written by 'simulate'")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  opts.seed = seed;
  opts.horizon_steps = horizon;
  opts.disturbances = !no_disturbance;
  if (solver == "external") {
    opts.solver.kind = decoy::SolverKind::External;
    const char* cmd = std::getenv(decoy::milp::kExternalSolverEnv);
    if (!cmd || !*cmd) {
      std::cerr << "error: --solver=external needs " << decoy::milp::kExternalSolverEnv
                << " to name the solver command\n";
      return 2;
    }
    opts.solver.external_command = cmd;
  }

  try {
    if (assign->parsed()) return decoy::cmd_assign(opts, std::cout);
    if (plan->parsed()) return decoy::cmd_plan(opts, std::cout);
    if (simulate->parsed()) return decoy::cmd_simulate(opts, std::cout);
    if (verify->parsed()) return decoy::cmd_verify(run_dir, std::cout);
  } catch (const decoy::Error& e) {
    std::cerr << "error[" << decoy::to_string(e.code()) << "]: " << e.what() << '\n';
    return e.code() == decoy::ErrorCode::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
