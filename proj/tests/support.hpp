#ifndef DECOY_TESTS_SUPPORT_HPP
#define DECOY_TESTS_SUPPORT_HPP

#include "decoy/commands.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

using decoy::Vec3;
using decoy::Vec6;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

/// Threat 18-23 km out at 2.5-5 km altitude, asset at the origin.
inline decoy::Threat random_threat(std::mt19937_64& rng) {
  const double az = uniform(rng, -M_PI, M_PI);
  const double range = uniform(rng, 18000.0, 23000.0);
  decoy::Threat t;
  t.position = Vec3(range * std::cos(az), range * std::sin(az), uniform(rng, 2500.0, 5000.0));
  t.speed = 274.0;
  t.jamming_constant = 105.0;
  return t;
}

/// One threat and `decoys` decoys. Decoy 0 starts outside the tracking cone
/// but within reach of it in roughly `steps` sampling intervals; the others
/// park far away so the assignment margin is large.
inline decoy::Scenario pair_scenario(std::mt19937_64& rng, int steps, int decoys = 2) {
  for (;;) {
    decoy::Scenario s;
    s.params.horizon_steps = steps;
    s.threats.push_back(random_threat(rng));
    const decoy::JammingTarget g = decoy::target_jamming_location(s.asset, s.threats[0]);
    // Start outside the tracking cone around the target, displaced sideways
    // by up to the distance coverable in `steps` intervals.
    const double reach = 0.45 * steps * s.params.sampling_time * s.params.v_ref();
    const Vec3 axis = (s.asset.position - s.threats[0].position).normalized();
    const Vec3 side = axis.cross(Vec3::UnitZ()).normalized();
    const double cone_radius =
        (g.location - s.threats[0].position).norm() * std::tan(s.params.cone_half_angle);
    const double lateral = cone_radius + uniform(rng, 0.1, 1.0) * reach;
    decoy::DecoyState d;
    d.position = g.location + (uniform(rng, 0, 1) < 0.5 ? 1.0 : -1.0) * lateral * side +
                 Vec3(0, 0, uniform(rng, -0.3, 0.3) * reach);
    d.position(2) = std::max(d.position(2), 30.0);
    s.decoys.push_back(d);
    for (int i = 1; i < decoys; ++i) {
      decoy::DecoyState far;
      far.position = d.position + Vec3(uniform(rng, 3000, 5000) * (i % 2 ? 1 : -1),
                                       uniform(rng, -500, 500) + 1500.0 * (i / 2), 0);
      far.position(2) = uniform(rng, 30.0, 300.0);
      s.decoys.push_back(far);
    }
    try {
      decoy::allocate(s);
      return s;
    } catch (const decoy::Error&) {
    }
  }
}

/// Disturbance sequence drawn uniformly from the boxes.
inline std::vector<decoy::Disturbance> random_disturbances(std::mt19937_64& rng, int count,
                                                           const decoy::PlanningParams& p) {
  std::vector<decoy::Disturbance> w(count);
  for (auto& d : w) d = decoy::sample_disturbance(p, &rng);
  return w;
}

}  // namespace testsupport

#endif  // DECOY_TESTS_SUPPORT_HPP
