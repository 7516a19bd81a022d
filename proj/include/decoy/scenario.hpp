#ifndef DECOY_SCENARIO_HPP
#define DECOY_SCENARIO_HPP

#include "decoy/core.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace decoy {

/// Surface asset. Planning treats the asset as stationary; the simulator may
/// move it with `velocity`.
struct Asset {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

enum class GuidanceKind { Asset, FakeAsset };

struct GuidanceTarget {
  GuidanceKind kind = GuidanceKind::Asset;
  int decoy = -1;  // decoy portraying the fake asset
};

struct Threat {
  Vec3 position = Vec3::Zero();
  double speed = 0.0;             // m/s
  double jamming_constant = 0.0;  // sqrt(m)
  GuidanceTarget guidance;
};

struct DecoyState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();

  Vec6 stacked() const {
    Vec6 x;
    x << position, velocity;
    return x;
  }
  static DecoyState from_stacked(const Vec6& x) {
    return {x.head<3>(), x.tail<3>()};
  }
};

/// Bounded additive disturbance of the discrete decoy model.
struct Disturbance {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

struct PlanningParams {
  double sampling_time = 2.0;   // T_s [s]
  int horizon_steps = 24;       // N
  double v_max = 40.0;          // [m/s]
  double beta_p = 6.0;          // [m]
  double beta_v = 1.0;          // [m/s]
  double decoy_diameter = 2.0;  // d [m]
  double cone_half_angle = 2.0 * M_PI / 180.0;  // theta [rad]
  double transmission_frequency = 1e9;          // [Hz]
  double max_doppler = 50.0;                    // [Hz]
  double speed_of_light = 299792458.0;          // [m/s]
  int micro_steps = 50;  // simulator sub-steps per sampling interval

  /// Largest component-wise speed that is tracked robustly.
  double v_ref() const { return v_max - beta_v; }
  double horizon_time() const { return horizon_steps * sampling_time; }
};

struct Scenario {
  Asset asset;
  std::vector<Threat> threats;
  std::vector<DecoyState> decoys;
  PlanningParams params;
  std::uint64_t seed = 1;
  double episode_time = 60.0;  // closed-loop episode length [s]
};

/// Raw parsed configuration: section -> key -> JSON-encoded value text.
struct ScenarioConfig {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string source;  // original text, kept for run snapshots
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
Scenario validate_scenario(const ScenarioConfig& config);
std::string render_config(const Scenario& scenario);

/// Threat velocity under pure pursuit of `guidance_point`.
Vec3 threat_velocity(const Threat& threat, const Vec3& guidance_point);

/// One forward-Euler step of the pursuit kinematics.
Threat threat_step(const Threat& threat, const Vec3& guidance_point, double dt);

/// Discrete planning model with one-step input delay:
/// p' = p + T_s v + w_p, v' = u + w_v.
DecoyState decoy_plan_step(const DecoyState& state, const Vec3& input,
                           const Disturbance& disturbance,
                           const PlanningParams& params);

/// Case-study-scale scenario (asset at origin, threats 19-23 km out, decoys
/// within 4 km). Rejection-samples until targets are viable and the
/// assignment margins exceed `min_margin`.
Scenario make_case_study(std::uint64_t seed, int decoys = 8, int threats = 6,
                         double min_margin = 600.0);

}  // namespace decoy

#endif  // DECOY_SCENARIO_HPP
