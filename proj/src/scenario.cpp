#include "decoy/scenario.hpp"

#include "decoy/assignment.hpp"
#include "decoy/geometry.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace decoy {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateDirection: return "degenerate-direction";
    case ErrorCode::InputBound: return "input-bound";
    case ErrorCode::DisturbanceBound: return "disturbance-bound";
    case ErrorCode::InvalidScenario: return "invalid-scenario";
    case ErrorCode::ConfigParse: return "config-parse";
    case ErrorCode::NoViableTarget: return "no-viable-target";
    case ErrorCode::InfeasibleAssignment: return "infeasible-assignment";
    case ErrorCode::EmptyEdgeSet: return "empty-edge-set";
    case ErrorCode::InfeasibleSafeSet: return "infeasible-safe-set";
    case ErrorCode::UnresolvedAtom: return "unresolved-atom";
    case ErrorCode::UnsoundBigM: return "unsound-big-m";
    case ErrorCode::InvalidModel: return "invalid-model";
    case ErrorCode::SolverSpawn: return "solver-spawn";
    case ErrorCode::SolverParse: return "solver-parse";
    case ErrorCode::SolverInfeasible: return "solver-infeasible";
    case ErrorCode::NoIntersection: return "no-intersection";
    case ErrorCode::EmptyFeasibleSet: return "empty-feasible-set";
    case ErrorCode::Usage: return "usage";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

Vec3 threat_velocity(const Threat& threat, const Vec3& guidance_point) {
  const Vec3 los = guidance_point - threat.position;
  const double dist = los.norm();
  if (!(dist > 0.0)) {
    throw Error(ErrorCode::DegenerateDirection,
                "guidance point coincides with threat position");
  }
  return threat.speed / dist * los;
}

Threat threat_step(const Threat& threat, const Vec3& guidance_point,
                   double dt) {
  Threat next = threat;
  next.position += dt * threat_velocity(threat, guidance_point);
  return next;
}

DecoyState decoy_plan_step(const DecoyState& state, const Vec3& input,
                           const Disturbance& disturbance,
                           const PlanningParams& params) {
  constexpr double kSlack = 1e-9;
  if (inf_norm(input) > params.v_max * (1.0 + kSlack)) {
    std::ostringstream os;
    os << "commanded velocity " << input.transpose()
       << " outside input box v_max=" << params.v_max;
    throw Error(ErrorCode::InputBound, os.str());
  }
  if (inf_norm(disturbance.position) > params.beta_p * (1.0 + kSlack) + kSlack ||
      inf_norm(disturbance.velocity) > params.beta_v * (1.0 + kSlack) + kSlack) {
    throw Error(ErrorCode::DisturbanceBound, "disturbance outside its box");
  }
  DecoyState next;
  next.position = state.position + params.sampling_time * state.velocity +
                  disturbance.position;
  next.velocity = input + disturbance.velocity;
  return next;
}

namespace {

// Targets and weights for a candidate scenario; returns the minimum margin or
// a negative value when any assumption fails.
double case_study_margin(const Scenario& s) {
  const int m = static_cast<int>(s.decoys.size());
  const int n = static_cast<int>(s.threats.size());
  Eigen::MatrixXd weights(m, n);
  std::vector<JammingTarget> targets;
  for (const Threat& threat : s.threats) {
    targets.push_back(target_jamming_location(s.asset, threat));
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      weights(i, j) = inf_norm(targets[j].location - s.decoys[i].position);
    }
  }
  const SequentialAssignment assignment = sequential_bottleneck(weights);
  const double v_ref = s.params.v_ref();
  for (const OrderRecord& rec : assignment.orders) {
    const double est = estimate_positioning_time(rec.weight, v_ref,
                                                 s.params.sampling_time);
    if (est >= targets[rec.task].viability_time) return -1.0;
    // Leave a few steps of slack inside the planning horizon.
    if (est > s.params.horizon_time() - 2.0 * s.params.sampling_time) {
      return -1.0;
    }
  }
  return assignment.min_margin();
}

}  // namespace

Scenario make_case_study(std::uint64_t seed, int decoys, int threats,
                         double min_margin) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Scenario s;
    s.seed = seed;
    const double sector = 2.0 * M_PI / threats;
    const double phase = 2.0 * M_PI * unit(rng);
    for (int j = 0; j < threats; ++j) {
      const double azimuth = phase + sector * (j + 0.15 + 0.7 * unit(rng));
      const double range = 19000.0 + 4000.0 * unit(rng);
      const double altitude = 2500.0 + 2500.0 * unit(rng);
      const double ground = std::sqrt(range * range - altitude * altitude);
      Threat t;
      t.position = Vec3(ground * std::cos(azimuth), ground * std::sin(azimuth),
                        altitude);
      t.speed = 274.0;
      t.jamming_constant = 105.0;
      s.threats.push_back(t);
    }
    // One decoy loosely staged towards each threat sector, the rest scattered.
    for (int i = 0; i < decoys; ++i) {
      DecoyState d;
      if (i < threats) {
        const Vec3 target =
            target_jamming_location(s.asset, s.threats[i]).location;
        const double reach = 500.0 + 1200.0 * unit(rng);
        // Offset roughly across the line of sight so the decoy has to move.
        const Vec3 los = s.threats[i].position - s.asset.position;
        const double side = unit(rng) < 0.5 ? -1.0 : 1.0;
        const double tilt = (unit(rng) - 0.5) * M_PI / 4.0;
        const double heading = std::atan2(los.y(), los.x()) + side * M_PI / 2.0 + tilt;
        const Vec3 dir(std::cos(heading), std::sin(heading), 0.0);
        d.position = target + reach * dir;
      } else {
        const double r = 4000.0 * std::sqrt(unit(rng));
        const double a = 2.0 * M_PI * unit(rng);
        d.position = Vec3(r * std::cos(a), r * std::sin(a), 0.0);
      }
      d.position.z() = 50.0 + 250.0 * unit(rng);
      if (d.position.head<2>().norm() > 4000.0) {
        d.position.head<2>() *= 4000.0 / d.position.head<2>().norm();
      }
      s.decoys.push_back(d);
    }
    if (case_study_margin(s) >= min_margin) return s;
  }
  throw Error(ErrorCode::InvalidScenario,
              "could not generate a case-study scenario satisfying the "
              "assignment assumptions");
}

}  // namespace decoy
