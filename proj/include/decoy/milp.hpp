#ifndef DECOY_MILP_HPP
#define DECOY_MILP_HPP

#include "decoy/core.hpp"

#include <string>
#include <vector>

namespace decoy::milp {

enum class VarKind { Continuous, Binary };
enum class Sense { LessEqual, Equal };
enum class RowFamily { Admissible, Safe, Spec, Plumbing };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = 0.0;
  // Continuous variables with a positive priority are implied integral by the
  // model and may be branched on; higher priorities branch first.
  int branch_priority = 0;
};

struct Term {
  int var = -1;
  double coef = 0.0;
};

struct Row {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  RowFamily family = RowFamily::Plumbing;
  int step = -1;
};

struct MilpModel {
  std::vector<Variable> variables;
  std::vector<Row> rows;
  std::vector<Term> objective;  // minimised
  double objective_constant = 0.0;
  // Positive when every integral solution has objective constant + integer
  // multiple of this value; used to tighten pruning.
  double objective_step = 0.0;

  int add_variable(std::string name, VarKind kind, double lower, double upper,
                   int branch_priority = 0);
  int add_row(std::string name, std::vector<Term> terms, Sense sense,
              double rhs, RowFamily family, int step = -1);

  int count(VarKind kind) const;
  int count(RowFamily family) const;
  int find_variable(const std::string& name) const;

  /// Checks bounds, binary domains, and that every term resolves.
  void validate() const;

  double objective_value(const Eigen::VectorXd& x) const;
  double row_activity(const Row& row, const Eigen::VectorXd& x) const;
  /// Largest row violation of x (0 when feasible).
  double max_row_violation(const Eigen::VectorXd& x) const;
};

enum class Status { Optimal, Infeasible, Unbounded, LimitHit };

const char* to_string(Status status);

struct Solution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  double bound = 0.0;  // best proven lower bound
  Eigen::VectorXd values;
  double gap = 0.0;
  long nodes = 0;
  long lp_iterations = 0;
  double wall_time = 0.0;
  bool has_incumbent() const { return values.size() > 0; }
};

struct Limits {
  double time_seconds = 600.0;
  long max_nodes = 1000000;
  double relative_gap = 0.0;
};

inline constexpr double kFeasibilityTol = 1e-6;
inline constexpr double kIntegralityTol = 1e-6;

/// LP relaxation with binaries relaxed to [0, 1].
Solution lp_relax(const MilpModel& model);

/// Best-first branch and bound.
Solution solve(const MilpModel& model, const Limits& limits = {});

/// Text LP-format export readable by common MILP solvers.
std::string write_lp(const MilpModel& model);

/// Parses "status <word>", "objective <value>" and "<name> <value>" lines.
Solution parse_solution(const MilpModel& model, const std::string& text);

/// Runs `solver_cmd <lp-file> <solution-file>` and parses the result.
Solution solve_external(const MilpModel& model, const std::string& solver_cmd,
                        const Limits& limits = {});

/// Environment variable naming the external solver command.
inline constexpr const char* kExternalSolverEnv = "DECOY_EXTERNAL_SOLVER";

}  // namespace decoy::milp

#endif  // DECOY_MILP_HPP
