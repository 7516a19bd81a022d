#ifndef DECOY_ENCODER_HPP
#define DECOY_ENCODER_HPP

#include "decoy/milp.hpp"
#include "decoy/safesets.hpp"

#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace decoy {

/// Right-hand side of `a'x <= rhs` tightened so that the row holds for every
/// disturbance in the box |w_p| <= beta_p, |w_v| <= beta_v, given the
/// disturbance coefficients of the row (stacked over all steps).
double robustify_row(const Eigen::VectorXd& wp_coeffs,
                     const Eigen::VectorXd& wv_coeffs, double rhs,
                     double beta_p, double beta_v);

/// Slack subtracted from every robustified row with decision variables.
inline constexpr double kRowBackoff = 1e-4;
/// Margin realising the strict burn-through inequality.
inline constexpr double kStrictMargin = 1e-4;
/// Relative inflation of computed big-M constants.
inline constexpr double kBigMSlack = 1.05;

/// Inputs for one positioning problem of a decoy/threat pair from step k.
struct MptpSetup {
  DecoyState x0;  // state at step k
  int k = 0;
  PlanningParams params;  // horizon N = params.horizon_steps
  /// Predicted engagement at an absolute step.
  std::function<Engagement(int)> engagement;
  SafeSetSpec safe;
  /// Uniform big-M override; unset derives tight per-row values.
  std::optional<double> big_m;
};

/// Variable ids of one encoded problem; vectors are indexed by l - k.
struct MptpIndex {
  int k = 0;
  int N = 0;
  std::vector<std::array<int, 3>> u;        // steps k..N-1
  std::vector<std::array<int, 5>> cone;     // steps k..N
  std::vector<std::array<int, 2>> doppler;  // steps k..N
  std::vector<int> burn;                    // steps k..N
  std::vector<int> g_cone, g_doppler, g_always, g_conj, g_pos;  // steps k..N
};

struct MptpEncoding {
  milp::MilpModel model;
  MptpIndex index;

  int auxiliary_binaries() const;
  /// Distinct continuous auxiliary variables (end-step aliases count once).
  int auxiliary_continuous() const;
};

/// Allocates inputs and auxiliary variables.
MptpEncoding allocate_mptp(const MptpSetup& setup);

void encode_admissible(MptpEncoding& enc, const MptpSetup& setup);
void encode_safe(MptpEncoding& enc, const MptpSetup& setup);
void encode_spec(MptpEncoding& enc, const MptpSetup& setup);
/// Objective (k - 1 + sum of the eventually indicators) * T_s.
void completion_cost(MptpEncoding& enc, double sampling_time);

/// Robust positioning problem: inputs, state and safe-set constraints, the
/// positioning specification and the completion-time objective.
MptpEncoding build_mptp(const MptpSetup& setup);

/// Planned inputs u[k..N-1] from a solution vector.
std::vector<Vec3> extract_inputs(const MptpEncoding& enc,
                                 const Eigen::VectorXd& values);

/// Planned completion step read off the objective indicator sum.
int planned_completion_step(const MptpEncoding& enc,
                            const Eigen::VectorXd& values);

/// Applies inputs from step k under the given per-step disturbances (empty
/// means none). The result is indexed by absolute step 0..N; entries before k
/// repeat x0.
std::vector<Vec6> rollout(const DecoyState& x0, int k, const std::vector<Vec3>& inputs,
                          const std::vector<Disturbance>& disturbances,
                          const PlanningParams& params);

}  // namespace decoy

#endif  // DECOY_ENCODER_HPP
