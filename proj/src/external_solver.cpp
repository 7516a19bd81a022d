#include "decoy/milp.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

extern char** environ;

namespace decoy::milp {

namespace {

namespace fs = std::filesystem;

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Scratch directory removed on scope exit.
struct ScratchDir {
  fs::path path;
  ScratchDir() {
    static std::atomic<unsigned> counter{0};
    path = fs::temp_directory_path() /
           ("decoy-lp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

Solution solve_external(const MilpModel& model, const std::string& solver_cmd,
                        const Limits& limits) {
  if (solver_cmd.empty()) {
    throw Error(ErrorCode::SolverSpawn, "no external solver command configured");
  }
  const auto t0 = std::chrono::steady_clock::now();
  ScratchDir dir;
  const fs::path lp_path = dir.path / "model.lp";
  const fs::path sol_path = dir.path / "model.sol";
  const fs::path log_path = dir.path / "solver.log";
  {
    std::ofstream out(lp_path);
    out << write_lp(model);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + lp_path.string());
  }

  std::ostringstream cmd;
  cmd << "DECOY_SOLVER_TIME_LIMIT=" << limits.time_seconds << " exec " << solver_cmd
      << ' ' << shell_quote(lp_path.string()) << ' ' << shell_quote(sol_path.string())
      << " >" << shell_quote(log_path.string()) << " 2>&1";
  const std::string script = cmd.str();
  const char* argv[] = {"/bin/sh", "-c", script.c_str(), nullptr};
  pid_t pid = 0;
  if (posix_spawn(&pid, "/bin/sh", nullptr, nullptr, const_cast<char**>(argv),
                  environ) != 0) {
    throw Error(ErrorCode::SolverSpawn, "cannot start /bin/sh for " + solver_cmd);
  }
  int wstatus = 0;
  if (waitpid(pid, &wstatus, 0) < 0) {
    throw Error(ErrorCode::SolverSpawn, "lost external solver process");
  }
  const int code = WIFEXITED(wstatus) ? WEXITSTATUS(wstatus) : -1;
  if (code == 126 || code == 127) {
    throw Error(ErrorCode::SolverSpawn, "cannot execute '" + solver_cmd +
                                            "': " + read_file(log_path));
  }
  if (!fs::exists(sol_path)) {
    throw Error(ErrorCode::SolverParse, "solver wrote no solution file (exit " +
                                            std::to_string(code) +
                                            "); raw output:\n" + read_file(log_path));
  }
  Solution sol = parse_solution(model, read_file(sol_path));
  sol.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (sol.status == Status::Infeasible) {
    throw Error(ErrorCode::SolverInfeasible, "external solver reports infeasibility");
  }
  return sol;
}

}  // namespace decoy::milp
