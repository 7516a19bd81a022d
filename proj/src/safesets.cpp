#include "decoy/safesets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace decoy {

double coordination_eta(double t, double mu_min, double diameter, double v_ref,
                        double sampling_time) {
  const double eta_min = 0.5 * (mu_min - diameter);
  return t <= sampling_time ? eta_min : v_ref * t + eta_min;
}

double SafeSetSpec::eta(double t) const {
  return std::min(
      coordination_eta(t, mu_min, safety_distance, v_ref, sampling_time),
      saturation);
}

double SafeSetSpec::zeta(double t) const {
  return saturation + 0.5 * (mu_min - safety_distance) - eta(t);
}

double bound_saturation(const SequentialAssignment& assignment, int order_index,
                        double safety_distance) {
  const double mu_min = assignment.min_margin();
  double a = kInfiniteMargin;
  for (int l = 0; l <= order_index; ++l) {
    const OrderRecord& r = assignment.orders[l];
    a = std::min(a, r.weight + r.margin - 0.5 * (mu_min + safety_distance));
  }
  return a;
}

SafeSetPlan make_safe_sets(const std::vector<Vec3>& initial_positions,
                           const std::vector<Vec3>& targets,
                           const SequentialAssignment& assignment,
                           double safety_distance, double v_ref,
                           double sampling_time) {
  SafeSetPlan plan;
  plan.mu_min = assignment.min_margin();
  if (!(plan.mu_min > safety_distance)) {
    std::ostringstream os;
    os << "smallest robustness margin " << plan.mu_min
       << " m does not exceed the safety distance " << safety_distance << " m";
    throw Error(ErrorCode::InfeasibleSafeSet, os.str());
  }
  const int n = static_cast<int>(assignment.orders.size());
  const double last_saturation =
      n > 0 ? bound_saturation(assignment, n - 1, safety_distance) : 0.0;
  for (int i = 0; i < static_cast<int>(initial_positions.size()); ++i) {
    SafeSetSpec spec;
    spec.origin = initial_positions[i];
    spec.safety_distance = safety_distance;
    spec.mu_min = plan.mu_min;
    spec.v_ref = v_ref;
    spec.sampling_time = sampling_time;
    const int l = assignment.order_index_of_agent(i);
    if (l >= 0) {
      spec.target = targets[assignment.orders[l].task];
      spec.saturation = bound_saturation(assignment, l, safety_distance);
    } else {
      spec.saturation = last_saturation;
    }
    plan.decoys.push_back(spec);
  }
  return plan;
}

Box safe_box(const SafeSetSpec& spec, double t) {
  if (std::isinf(spec.mu_min)) {
    // A lone decoy has nobody to keep clear of.
    const double inf = std::numeric_limits<double>::infinity();
    return Box{Vec3::Constant(-inf), Vec3::Constant(inf)};
  }
  const double eta = spec.eta(t) - spec.epsilon;
  Box box{spec.origin.array() - eta, spec.origin.array() + eta};
  if (spec.target) {
    const double zeta = spec.zeta(t);
    if (!(zeta > spec.epsilon)) {
      throw Error(ErrorCode::InfeasibleSafeSet, "target cube is empty");
    }
    const double half = zeta - spec.epsilon;
    box.lower = box.lower.cwiseMax((spec.target->array() - half).matrix());
    box.upper = box.upper.cwiseMin((spec.target->array() + half).matrix());
  }
  if (!(eta > 0.0) || box.empty()) {
    std::ostringstream os;
    os << "safe set empty at t=" << t;
    throw Error(ErrorCode::InfeasibleSafeSet, os.str());
  }
  return box;
}

namespace {

void append_cube(Polyhedron& poly, const Vec3& center, double half) {
  for (int axis = 0; axis < 3; ++axis) {
    const Vec3 e = Vec3::Unit(axis);
    poly.append(Polyhedron::position_row(e), center(axis) + half);
    poly.append(Polyhedron::position_row(-e), -center(axis) + half);
  }
}

}  // namespace

Polyhedron local_safe_set(const SafeSetSpec& spec, double t) {
  safe_box(spec, t);  // emptiness check
  Polyhedron poly;
  if (std::isinf(spec.mu_min)) return poly;
  append_cube(poly, spec.origin, spec.eta(t) - spec.epsilon);
  if (spec.target) {
    append_cube(poly, *spec.target, spec.zeta(t) - spec.epsilon);
  }
  return poly;
}

std::vector<SafetyViolation> check_collision_free(
    const std::vector<Vec3>& positions, const SafeSetPlan& plan, double t,
    double tol) {
  std::vector<SafetyViolation> out;
  const int m = static_cast<int>(positions.size());
  for (int i = 0; i < m; ++i) {
    if (!safe_box(plan.decoys[i], t).contains(positions[i], tol)) {
      SafetyViolation v;
      v.kind = SafetyViolation::Kind::OutsideSafeSet;
      v.decoy = i;
      out.push_back(v);
    }
  }
  const double s = m > 0 ? plan.decoys[0].safety_distance : 0.0;
  for (int i = 0; i < m; ++i) {
    if (!plan.decoys[i].target) continue;
    for (int k = 0; k < m; ++k) {
      if (k == i || (plan.decoys[k].target && k < i)) continue;
      const double dist = inf_norm(positions[i] - positions[k]);
      if (!(dist > s)) {
        SafetyViolation v;
        v.kind = SafetyViolation::Kind::TooClose;
        v.decoy = i;
        v.other = k;
        v.distance = dist;
        out.push_back(v);
      }
    }
  }
  return out;
}

}  // namespace decoy
