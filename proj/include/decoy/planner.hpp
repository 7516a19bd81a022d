#ifndef DECOY_PLANNER_HPP
#define DECOY_PLANNER_HPP

#include "decoy/encoder.hpp"

#include <string>
#include <vector>

namespace decoy {

/// High-level allocation: jamming targets, weights, sequential assignment
/// and the safe sets derived from it.
struct AllocationReport {
  std::vector<JammingTarget> targets;  // per threat
  Eigen::MatrixXd weights;             // decoys x threats, infinity-norm distance
  SequentialAssignment assignment;
  SafeSetPlan safe_sets;
  std::vector<double> estimated_times;  // per order
};

/// Runs the allocation. Throws NoViableTarget / InfeasibleAssignment when a
/// pair cannot make its target in time, and InfeasibleSafeSet when the
/// smallest margin does not exceed the decoy diameter.
AllocationReport allocate(const Scenario& scenario);

enum class SolverKind { Builtin, External };

struct SolverOptions {
  SolverKind kind = SolverKind::Builtin;
  std::string external_command;  // used when kind == External
  milp::Limits limits;
};

/// Positioning problem of an assigned decoy from the given current states.
MptpSetup make_setup(const Scenario& scenario, const AllocationReport& alloc,
                     int order_index, const DecoyState& x0, int k,
                     const Asset& asset_now, const Threat& threat_now);

struct DecoyPlan {
  int order = 0;  // 1-based
  int decoy = -1;
  int threat = -1;
  int k = 0;
  milp::Solution solution;
  std::vector<Vec3> inputs;        // u[k..N-1]
  int planned_completion = -1;     // step; -1 when no plan
  std::string error;               // non-empty when solving failed
  int binaries = 0;
  int continuous_aux = 0;

  bool ok() const { return planned_completion >= 0; }
  double planned_time(double sampling_time) const {
    return planned_completion * sampling_time;
  }
};

DecoyPlan solve_plan(const MptpSetup& setup, const SolverOptions& options);

/// Solves the step-0 problem of every assigned decoy concurrently, ordered by
/// assignment order.
std::vector<DecoyPlan> plan_all(const Scenario& scenario,
                                const AllocationReport& alloc,
                                const SolverOptions& options);

}  // namespace decoy

#endif  // DECOY_PLANNER_HPP
