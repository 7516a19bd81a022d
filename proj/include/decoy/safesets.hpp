#ifndef DECOY_SAFESETS_HPP
#define DECOY_SAFESETS_HPP

#include "decoy/assignment.hpp"
#include "decoy/geometry.hpp"

#include <optional>
#include <vector>

namespace decoy {

inline constexpr double kSafeSetEpsilon = 1e-3;

/// Shared coordination variable: constant until the first sample, then a
/// ramp at the reference speed.
double coordination_eta(double t, double mu_min, double diameter, double v_ref,
                        double sampling_time);

/// Axis-aligned box; the intersection of infinity-norm cubes is one.
struct Box {
  Vec3 lower;
  Vec3 upper;

  bool empty() const { return (upper.array() < lower.array()).any(); }
  bool contains(const Vec3& p, double tol = 0.0) const {
    return (p.array() >= lower.array() - tol).all() &&
           (p.array() <= upper.array() + tol).all();
  }
};

struct SafeSetSpec {
  Vec3 origin = Vec3::Zero();   // initial decoy position
  std::optional<Vec3> target;   // assigned jamming location
  double saturation = 0.0;      // bound saturation A
  double safety_distance = 0.0;
  double mu_min = 0.0;
  double v_ref = 0.0;
  double sampling_time = 0.0;
  double epsilon = kSafeSetEpsilon;

  double eta(double t) const;   // saturated cube half-width before epsilon
  double zeta(double t) const;  // target cube half-width before epsilon
};

struct SafeSetPlan {
  std::vector<SafeSetSpec> decoys;
  double mu_min = 0.0;
};

/// Safe-set parameters for every decoy from the sequential assignment.
SafeSetPlan make_safe_sets(const std::vector<Vec3>& initial_positions,
                           const std::vector<Vec3>& targets,
                           const SequentialAssignment& assignment,
                           double safety_distance, double v_ref,
                           double sampling_time);

/// Bound saturation A of an order (0-based index into assignment.orders).
double bound_saturation(const SequentialAssignment& assignment, int order_index,
                        double safety_distance);

Box safe_box(const SafeSetSpec& spec, double t);

/// 12 rows for an assigned decoy (two cubes), 6 rows otherwise.
Polyhedron local_safe_set(const SafeSetSpec& spec, double t);

struct SafetyViolation {
  enum class Kind { OutsideSafeSet, TooClose } kind = Kind::OutsideSafeSet;
  int decoy = -1;
  int other = -1;
  double distance = 0.0;
};

/// Safe-set membership of every decoy plus infinity-norm separation of each
/// assigned decoy from all others.
std::vector<SafetyViolation> check_collision_free(
    const std::vector<Vec3>& positions, const SafeSetPlan& plan, double t,
    double tol = 0.0);

}  // namespace decoy

#endif  // DECOY_SAFESETS_HPP
