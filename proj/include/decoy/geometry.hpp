#ifndef DECOY_GEOMETRY_HPP
#define DECOY_GEOMETRY_HPP

#include "decoy/scenario.hpp"

#include <utility>

namespace decoy {

/// Half-space representation {x in R^6 : A x <= b} over the stacked decoy
/// state x = (p, v).
struct Polyhedron {
  Eigen::Matrix<double, Eigen::Dynamic, 6> A;
  Eigen::VectorXd b;

  Polyhedron() : A(0, 6), b(0) {}

  Eigen::Index rows() const { return A.rows(); }
  void append(const Vec6& normal, double offset);
  void append(const Polyhedron& other);
  bool contains(const Vec6& x, double tol = 0.0) const;
  /// Largest row residual A x - b (negative when strictly inside).
  double max_violation(const Vec6& x) const;
  /// Row on position components only.
  static Vec6 position_row(const Vec3& n);
  static Vec6 velocity_row(const Vec3& n);
};

/// Snapshot of one threat engagement at time t used by the set constructions.
struct Engagement {
  Vec3 threat_position;
  Vec3 threat_velocity;
  Vec3 asset_position;
  Vec3 asset_velocity;
  double speed = 0.0;
  double jamming_constant = 0.0;

  double range() const { return (asset_position - threat_position).norm(); }
};

/// Straight-line prediction t seconds ahead of the current states: the threat
/// keeps its current heading towards the asset, which is held in place.
Engagement predict_engagement(const Asset& asset, const Threat& threat,
                              double t);

bool tracking_cone_contains(const Vec3& p, const Engagement& e, double theta);
bool tracking_cone_contains(const Vec3& p, const Threat& threat,
                            const Asset& asset, double theta, double t);

/// Orthonormal pair (h1, h2) perpendicular to `axis`.
std::pair<Vec3, Vec3> perpendicular_axes(const Vec3& axis);

/// Half-angle of the square pyramid inscribed in a circular cone of
/// half-angle theta (its edges lie on the cone surface).
double inscribed_half_angle(double theta);

/// Five-row inner approximation of the tracking cone.
Polyhedron approx_tracking_cone(const Engagement& e, double theta);

template <typename Derived1, typename Derived2>
typename Derived1::Scalar burn_through_range(
    const Eigen::MatrixBase<Derived1>& p, const Eigen::MatrixBase<Derived2>& z,
    typename Derived1::Scalar jamming_constant) {
  using std::sqrt;
  return jamming_constant * sqrt((p - z).norm());
}

/// Single-row outer approximation of the burn-through region inside the cone.
Polyhedron burn_through_halfspace(const Engagement& e, double theta);

template <typename Scalar>
Scalar doppler_shift(const Vector3<Scalar>& v, const Vector3<Scalar>& zdot,
                     Scalar frequency, Scalar speed, Scalar light_speed) {
  return frequency / (speed * light_speed) * (v - zdot).dot(zdot);
}

/// Velocity band along the threat heading with Doppler deviation bounded by
/// the tolerance.
Polyhedron doppler_set(const Engagement& e, const PlanningParams& params);

/// Half-width of the Doppler band in velocity units along the unit heading.
double doppler_velocity_tolerance(const PlanningParams& params);

struct JammingTarget {
  Vec3 location = Vec3::Zero();
  double viability_time = 0.0;
};

JammingTarget target_jamming_location(const Asset& asset, const Threat& threat);

double estimate_positioning_time(double distance, double v_ref,
                                 double sampling_time);

}  // namespace decoy

#endif  // DECOY_GEOMETRY_HPP
