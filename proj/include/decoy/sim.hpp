#ifndef DECOY_SIM_HPP
#define DECOY_SIM_HPP

#include "decoy/planner.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace decoy {

/// Low-level tracking of one commanded velocity over a sampling interval.
struct TrackStep {
  DecoyState end;
  Disturbance disturbance;
  /// Intermediate states at the micro-step instants (first = start, last =
  /// end position); velocities report the tracked state velocity.
  std::vector<DecoyState> micro;
};

/// Draws a disturbance uniformly from the boxes, or none when rng is null.
Disturbance sample_disturbance(const PlanningParams& params, std::mt19937_64* rng);

TrackStep low_level_track(const Vec3& command, const DecoyState& state,
                          const PlanningParams& params, std::mt19937_64* rng);

/// Ground point on the line from the threat through the decoy.
Vec3 fake_asset_position(const Vec3& decoy, const Vec3& threat);

/// Seduction command: the parallel component matches the asset's Doppler
/// shift, the orthogonal component is as large as the input box allows.
/// With a nonzero `preferred` direction the orthogonal component is pushed
/// as far as possible along it instead, which keeps a lure consistent from
/// step to step. Guards keep the decoy above ground clearance and below the
/// threat.
Vec3 seduction_input(const DecoyState& decoy, const Engagement& engagement,
                     const PlanningParams& params,
                     const Vec3& preferred = Vec3::Zero());

struct SimOptions {
  bool disturbances = true;
  std::uint64_t seed = 1;
  SolverOptions solver;  // closed loop only
};

struct SimEvent {
  int step = 0;
  std::string text;
};

struct MonitorViolation {
  int step = 0;
  double time = 0.0;
  SafetyViolation violation;
};

enum class SimMode { OpenLoop, ClosedLoop };

struct SimResult {
  SimMode mode = SimMode::OpenLoop;
  PlanningParams params;
  std::vector<double> times;  // sample instants 0..K
  std::vector<Vec3> asset;
  Vec3 asset_velocity = Vec3::Zero();
  std::vector<std::vector<Vec6>> decoys;        // [decoy][step]
  std::vector<std::vector<Vec3>> threat_pos;    // [threat][step]
  std::vector<std::vector<Vec3>> threat_vel;    // [threat][step], before any lock switch at that step
  std::vector<std::vector<int>> seducer;        // [threat][step], decoy luring it or -1
  std::vector<std::vector<Vec3>> fake_assets;   // [threat][step], NaN while locked on the asset
  std::vector<int> assigned_threat;             // [decoy], -1 when unassigned
  std::vector<int> planned_completion;          // [decoy], step-0 plan, -1 if none
  std::vector<int> switch_step;                 // [decoy], seduction start or -1
  std::vector<std::optional<int>> completion;   // [decoy], from the logged states
  std::vector<double> min_distance_per_step;    // infinity norm over all pairs
  double min_distance = 0.0;
  std::vector<MonitorViolation> violations;
  std::vector<bool> diverted;                   // [threat]
  std::vector<double> fake_asset_distance;      // [threat], true asset to final fake asset
  std::vector<SimEvent> events;

  int steps() const { return static_cast<int>(times.size()) - 1; }
  /// Engagement of a threat reconstructed from the log at a step.
  Engagement engagement(const Scenario& scenario, int threat, int step) const;
};

/// Completion step of every assigned decoy recomputed from the log.
std::vector<std::optional<int>> logged_completion(const SimResult& result,
                                                  const Scenario& scenario);

/// Applies the step-0 plans over the planning horizon with the asset held
/// in place; unassigned decoys stay where they are.
SimResult run_open_loop(const Scenario& scenario, const AllocationReport& alloc,
                        const std::vector<DecoyPlan>& plans, const SimOptions& options);

/// Shrinking-horizon re-planning at every step until the episode ends; a
/// decoy switches to seduction once its plan completes at the current step.
SimResult run_closed_loop(const Scenario& scenario, const AllocationReport& alloc,
                          const SimOptions& options);

}  // namespace decoy

#endif  // DECOY_SIM_HPP
