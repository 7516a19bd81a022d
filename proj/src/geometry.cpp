#include "decoy/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace decoy {

void Polyhedron::append(const Vec6& normal, double offset) {
  const Eigen::Index r = A.rows();
  A.conservativeResize(r + 1, Eigen::NoChange);
  b.conservativeResize(r + 1);
  A.row(r) = normal.transpose();
  b(r) = offset;
}

void Polyhedron::append(const Polyhedron& other) {
  const Eigen::Index r = A.rows();
  A.conservativeResize(r + other.rows(), Eigen::NoChange);
  b.conservativeResize(r + other.rows());
  A.bottomRows(other.rows()) = other.A;
  b.tail(other.rows()) = other.b;
}

bool Polyhedron::contains(const Vec6& x, double tol) const {
  return rows() == 0 || max_violation(x) <= tol;
}

double Polyhedron::max_violation(const Vec6& x) const {
  if (rows() == 0) return -std::numeric_limits<double>::infinity();
  return (A * x - b).maxCoeff();
}

Vec6 Polyhedron::position_row(const Vec3& n) {
  Vec6 r;
  r << n, Vec3::Zero();
  return r;
}

Vec6 Polyhedron::velocity_row(const Vec3& n) {
  Vec6 r;
  r << Vec3::Zero(), n;
  return r;
}

Engagement predict_engagement(const Asset& asset, const Threat& threat,
                              double t) {
  const Vec3 los = asset.position - threat.position;
  const double range = los.norm();
  if (!(range > 0.0)) {
    throw Error(ErrorCode::DegenerateDirection,
                "threat coincides with the asset");
  }
  Engagement e;
  e.threat_velocity = threat.speed / range * los;
  e.threat_position = threat.position + t * e.threat_velocity;
  e.asset_position = asset.position;
  e.asset_velocity = asset.velocity;
  e.speed = threat.speed;
  e.jamming_constant = threat.jamming_constant;
  return e;
}

bool tracking_cone_contains(const Vec3& p, const Engagement& e, double theta) {
  const Vec3 rel = p - e.threat_position;
  const double dist = rel.norm();
  return dist * e.speed * std::cos(theta) <= rel.dot(e.threat_velocity) &&
         dist <= e.range();
}

bool tracking_cone_contains(const Vec3& p, const Threat& threat,
                            const Asset& asset, double theta, double t) {
  return tracking_cone_contains(p, predict_engagement(asset, threat, t), theta);
}

std::pair<Vec3, Vec3> perpendicular_axes(const Vec3& axis) {
  const double len = axis.norm();
  if (!(len > 0.0)) {
    throw Error(ErrorCode::DegenerateDirection, "zero cone axis");
  }
  const Vec3 a = axis / len;
  Eigen::Index pick = 0;
  a.cwiseAbs().minCoeff(&pick);  // first index on ties
  Vec3 h1 = Vec3::Unit(pick) - a(pick) * a;
  h1.normalize();
  const Vec3 h2 = a.cross(h1);
  return {h1, h2};
}

double inscribed_half_angle(double theta) {
  return std::atan(std::tan(theta) / std::sqrt(2.0));
}

Polyhedron approx_tracking_cone(const Engagement& e, double theta) {
  const auto [h1, h2] = perpendicular_axes(e.threat_velocity);
  const double omega = inscribed_half_angle(theta) + M_PI / 2.0;
  Polyhedron poly;
  for (const Vec3& h : {h1, h2}) {
    for (const double sign : {1.0, -1.0}) {
      const Vec3 n = Eigen::AngleAxisd(sign * omega, h) * e.threat_velocity;
      poly.append(Polyhedron::position_row(n), n.dot(e.threat_position));
    }
  }
  const Vec3& zd = e.threat_velocity;
  poly.append(Polyhedron::position_row(zd),
              zd.dot(e.threat_position) +
                  e.range() * e.speed * std::cos(theta));
  return poly;
}

Polyhedron burn_through_halfspace(const Engagement& e, double theta) {
  const double k2 = e.jamming_constant * e.jamming_constant;
  const double r2 = e.range() * e.range();
  const double eps = 1e-6 * r2 * e.speed;
  Polyhedron poly;
  poly.append(Polyhedron::position_row(-k2 * e.threat_velocity),
              -k2 * e.threat_velocity.dot(e.threat_position) -
                  r2 * e.speed * std::cos(theta) - eps);
  return poly;
}

double doppler_velocity_tolerance(const PlanningParams& params) {
  return params.max_doppler * params.speed_of_light /
         params.transmission_frequency;
}

Polyhedron doppler_set(const Engagement& e, const PlanningParams& params) {
  const Vec3& zd = e.threat_velocity;
  if (!(zd.norm() > 0.0)) {
    throw Error(ErrorCode::DegenerateDirection, "zero threat velocity");
  }
  const double center = zd.dot(e.asset_velocity);
  const double band = params.max_doppler * e.speed * params.speed_of_light /
                      params.transmission_frequency;
  Polyhedron poly;
  poly.append(Polyhedron::velocity_row(-zd), -center + band);
  poly.append(Polyhedron::velocity_row(zd), center + band);
  return poly;
}

JammingTarget target_jamming_location(const Asset& asset,
                                      const Threat& threat) {
  const Vec3 diff = asset.position - threat.position;
  const double range = diff.norm();
  const double k2 = threat.jamming_constant * threat.jamming_constant;
  if (!(range > k2 / 4.0)) {
    std::ostringstream os;
    os << "threat at range " << range << " m is inside k^2/4 = " << k2 / 4.0;
    throw Error(ErrorCode::NoViableTarget, os.str());
  }
  JammingTarget target;
  target.location = asset.position - k2 / (4.0 * range) * diff;
  target.viability_time = (4.0 * range - k2) / (4.0 * threat.speed);
  return target;
}

double estimate_positioning_time(double distance, double v_ref,
                                 double sampling_time) {
  return distance / v_ref + sampling_time;
}

}  // namespace decoy
