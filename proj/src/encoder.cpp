#include "decoy/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace decoy {

using milp::RowFamily;
using milp::Sense;
using milp::Term;
using milp::VarKind;

double robustify_row(const Eigen::VectorXd& wp_coeffs,
                     const Eigen::VectorXd& wv_coeffs, double rhs,
                     double beta_p, double beta_v) {
  return rhs - beta_p * wp_coeffs.lpNorm<1>() - beta_v * wv_coeffs.lpNorm<1>();
}

int MptpEncoding::auxiliary_binaries() const {
  return model.count(VarKind::Binary);
}

int MptpEncoding::auxiliary_continuous() const {
  std::vector<int> ids;
  for (const auto* v : {&index.g_cone, &index.g_doppler, &index.g_always,
                        &index.g_conj, &index.g_pos}) {
    ids.insert(ids.end(), v->begin(), v->end());
  }
  std::sort(ids.begin(), ids.end());
  return static_cast<int>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

namespace {

std::string tag(const char* prefix, int l, int q = -1) {
  std::ostringstream os;
  os << prefix << '_' << l;
  if (q >= 0) os << '_' << q;
  return os.str();
}

// State row a'x at step l written as terms over the inputs plus a constant,
// with the worst-case disturbance contribution.
struct StateForm {
  std::vector<Term> terms;
  double constant = 0.0;
  double tightening = 0.0;
};

StateForm state_form(const MptpEncoding& enc, const MptpSetup& setup, int l,
                     const Vec6& a) {
  const PlanningParams& p = setup.params;
  const int k = setup.k;
  StateForm f;
  if (l == k) {
    f.constant = a.dot(setup.x0.stacked());
    return f;
  }
  const Vec3 ap = a.head<3>();
  const Vec3 av = a.tail<3>();
  const double Ts = p.sampling_time;
  f.constant = ap.dot(setup.x0.position + Ts * setup.x0.velocity);
  const int steps = l - k;
  Eigen::VectorXd wp(3 * steps), wv(3 * steps);
  for (int q = k; q < l; ++q) {
    const Vec3 cu = q <= l - 2 ? Vec3(Ts * ap) : av;
    const auto& ids = enc.index.u[q - k];
    for (int c = 0; c < 3; ++c) {
      if (cu(c) != 0.0) f.terms.push_back({ids[c], cu(c)});
    }
    wp.segment<3>(3 * (q - k)) = ap;
    wv.segment<3>(3 * (q - k)) = cu;
  }
  f.tightening = -robustify_row(wp, wv, 0.0, p.beta_p, p.beta_v);
  return f;
}

// Range of a'x over the big-M bounding set at step l: the initial state at
// step k, otherwise the safe box cut down to the positions reachable from
// x0, times the velocity box.
std::pair<double, double> form_range(const MptpSetup& setup, int l, const Vec6& a) {
  if (l == setup.k) {
    const double v = a.dot(setup.x0.stacked());
    return {v, v};
  }
  const PlanningParams& p = setup.params;
  const double vmax = p.v_max;
  const double reach = (l - setup.k) * (p.sampling_time * vmax + p.beta_p);
  Box box = safe_box(setup.safe, l * p.sampling_time);
  box.lower = box.lower.cwiseMax((setup.x0.position.array() - reach).matrix());
  box.upper = box.upper.cwiseMin((setup.x0.position.array() + reach).matrix());
  double lo = 0.0, hi = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double ap = a(c), av = a(3 + c);
    hi += std::max(ap * box.lower(c), ap * box.upper(c)) + std::abs(av) * vmax;
    lo += std::min(ap * box.lower(c), ap * box.upper(c)) - std::abs(av) * vmax;
  }
  return {lo, hi};
}

// Adds the robust row a'x <= b at step l. Returns the tightened rhs
// (right-hand side minus constant, disturbance and back-off) and the terms.
struct RobustRow {
  std::vector<Term> terms;
  double rhs = 0.0;
  double worst = 0.0;  // largest left-hand side over the bounding set
};

RobustRow robust_row(const MptpEncoding& enc, const MptpSetup& setup, int l,
                     Vec6 a, double b) {
  const double scale = a.norm();
  a /= scale;
  b /= scale;
  const StateForm f = state_form(enc, setup, l, a);
  RobustRow r;
  r.terms = f.terms;
  const double backoff = l == setup.k ? 0.0 : kRowBackoff;
  r.rhs = b - f.constant - f.tightening - backoff;
  r.worst = form_range(setup, l, a).second - f.constant;
  return r;
}

class SpecEncoder {
 public:
  SpecEncoder(MptpEncoding& enc, const MptpSetup& setup) : enc_(enc), setup_(setup) {}

  // a'x <= b enforced when var == active; relaxed otherwise.
  void indicator(const std::string& name, int l, const Vec6& a, double b, int var,
                 int active) {
    RobustRow r = robust_row(enc_, setup_, l, a, b);
    const double needed = r.worst - r.rhs;
    double M = std::max(kBigMSlack * needed, 0.0) + 1.0;
    if (setup_.big_m) {
      if (*setup_.big_m < needed) {
        std::ostringstream os;
        os << "big-M " << *setup_.big_m << " below attainable residual " << needed
           << " in row " << name;
        throw Error(ErrorCode::UnsoundBigM, os.str());
      }
      M = *setup_.big_m;
    }
    if (active == 1) {
      r.terms.push_back({var, M});
      r.rhs += M;
    } else {
      r.terms.push_back({var, -M});
    }
    enc_.model.add_row(name, std::move(r.terms), Sense::LessEqual, r.rhs,
                       RowFamily::Spec, l);
  }

  void logic(const std::string& name, int l, std::vector<Term> terms, Sense sense,
             double rhs) {
    enc_.model.add_row(name, std::move(terms), sense, rhs, RowFamily::Spec, l);
  }

 private:
  MptpEncoding& enc_;
  const MptpSetup& setup_;
};

}  // namespace

MptpEncoding allocate_mptp(const MptpSetup& setup) {
  const int k = setup.k;
  const int N = setup.params.horizon_steps;
  if (k < 0 || k > N) {
    throw Error(ErrorCode::InvalidModel, "planning step outside the horizon");
  }
  if (!setup.safe.target) {
    throw Error(ErrorCode::InvalidModel,
                "unassigned decoys stay stationary and have no positioning problem");
  }
  if (!setup.engagement) {
    throw Error(ErrorCode::InvalidModel, "no engagement prediction supplied");
  }
  MptpEncoding enc;
  enc.index.k = k;
  enc.index.N = N;
  milp::MilpModel& m = enc.model;
  const double vmax = setup.params.v_max;
  static const char* axes[3] = {"x", "y", "z"};
  for (int l = k; l < N; ++l) {
    std::array<int, 3> ids{};
    for (int c = 0; c < 3; ++c) {
      ids[c] = m.add_variable(tag("u", l) + "_" + axes[c], VarKind::Continuous, -vmax, vmax);
    }
    enc.index.u.push_back(ids);
  }
  for (int l = k; l <= N; ++l) {
    std::array<int, 5> cone{};
    for (int q = 0; q < 5; ++q) cone[q] = m.add_variable(tag("bc", l, q), VarKind::Binary, 0, 1);
    std::array<int, 2> dop{};
    for (int q = 0; q < 2; ++q) dop[q] = m.add_variable(tag("bd", l, q), VarKind::Binary, 0, 1);
    enc.index.cone.push_back(cone);
    enc.index.doppler.push_back(dop);
    enc.index.burn.push_back(m.add_variable(tag("bb", l), VarKind::Binary, 0, 1));
  }
  for (int l = k; l <= N; ++l) {
    enc.index.g_cone.push_back(m.add_variable(tag("gc", l), VarKind::Continuous, 0, 1));
    enc.index.g_doppler.push_back(m.add_variable(tag("gd", l), VarKind::Continuous, 0, 1));
    enc.index.g_always.push_back(
        l == N ? enc.index.g_doppler.back()
               : m.add_variable(tag("ga", l), VarKind::Continuous, 0, 1));
    enc.index.g_conj.push_back(m.add_variable(tag("gf", l), VarKind::Continuous, 0, 1, 1));
    enc.index.g_pos.push_back(
        l == N ? enc.index.g_conj.back()
               : m.add_variable(tag("gp", l), VarKind::Continuous, 0, 1, 2));
  }
  return enc;
}

void encode_admissible(MptpEncoding& enc, const MptpSetup& setup) {
  const PlanningParams& p = setup.params;
  for (int l = setup.k; l <= enc.index.N; ++l) {
    int r = 0;
    auto add = [&](const Vec6& a, double b) {
      RobustRow row = robust_row(enc, setup, l, a, b);
      enc.model.add_row(tag("X", l, r++), std::move(row.terms), Sense::LessEqual,
                        row.rhs, RowFamily::Admissible, l);
    };
    add(Polyhedron::position_row(-Vec3::UnitZ()), -0.5 * p.decoy_diameter);
    for (int c = 0; c < 3; ++c) {
      add(Polyhedron::velocity_row(Vec3::Unit(c)), p.v_max);
      add(Polyhedron::velocity_row(-Vec3::Unit(c)), p.v_max);
    }
  }
}

void encode_safe(MptpEncoding& enc, const MptpSetup& setup) {
  for (int l = setup.k; l <= enc.index.N; ++l) {
    const Polyhedron poly = local_safe_set(setup.safe, l * setup.params.sampling_time);
    for (Eigen::Index r = 0; r < poly.rows(); ++r) {
      RobustRow row = robust_row(enc, setup, l, poly.A.row(r).transpose(), poly.b(r));
      enc.model.add_row(tag("L", l, static_cast<int>(r)), std::move(row.terms),
                        Sense::LessEqual, row.rhs, RowFamily::Safe, l);
    }
  }
}

void encode_spec(MptpEncoding& enc, const MptpSetup& setup) {
  const MptpIndex& ix = enc.index;
  const PlanningParams& p = setup.params;
  const double theta = p.cone_half_angle;
  SpecEncoder spec(enc, setup);
  for (int l = ix.k; l <= ix.N; ++l) {
    const int i = l - ix.k;
    const Engagement e = setup.engagement(l);

    const Polyhedron cone = approx_tracking_cone(e, theta);
    for (int q = 0; q < 5; ++q) {
      spec.indicator(tag("S_cone", l, q), l, cone.A.row(q).transpose(), cone.b(q),
                     ix.cone[i][q], 1);
    }
    const Polyhedron dop = doppler_set(e, p);
    for (int q = 0; q < 2; ++q) {
      spec.indicator(tag("S_dop", l, q), l, dop.A.row(q).transpose(), dop.b(q),
                     ix.doppler[i][q], 1);
    }
    // Outside the burn-through half-space by a strict margin when bb = 0.
    const Polyhedron burn = burn_through_halfspace(e, theta);
    const Vec6 an = burn.A.row(0).transpose();
    const double scale = an.norm();
    spec.indicator(tag("S_burn", l), l, -an / scale,
                   -burn.b(0) / scale - kStrictMargin, ix.burn[i], 0);

    for (int q = 0; q < 5; ++q) {
      spec.logic(tag("S_lc", l, q), l, {{ix.g_cone[i], 1.0}, {ix.cone[i][q], -1.0}},
                 Sense::LessEqual, 0.0);
    }
    for (int q = 0; q < 2; ++q) {
      spec.logic(tag("S_ld", l, q), l,
                 {{ix.g_doppler[i], 1.0}, {ix.doppler[i][q], -1.0}}, Sense::LessEqual,
                 0.0);
    }
    if (l < ix.N) {
      spec.logic(tag("S_ga", l, 0), l, {{ix.g_always[i], 1.0}, {ix.g_doppler[i], -1.0}},
                 Sense::LessEqual, 0.0);
      spec.logic(tag("S_ga", l, 1), l,
                 {{ix.g_always[i], 1.0}, {ix.g_always[i + 1], -1.0}}, Sense::LessEqual,
                 0.0);
    }
    spec.logic(tag("S_gf", l, 0), l, {{ix.g_conj[i], 1.0}, {ix.g_cone[i], -1.0}},
               Sense::LessEqual, 0.0);
    spec.logic(tag("S_gf", l, 1), l, {{ix.g_conj[i], 1.0}, {ix.burn[i], 1.0}},
               Sense::LessEqual, 1.0);
    spec.logic(tag("S_gf", l, 2), l, {{ix.g_conj[i], 1.0}, {ix.g_always[i], -1.0}},
               Sense::LessEqual, 0.0);
    if (l < ix.N) {
      spec.logic(tag("S_gp", l, 0), l, {{ix.g_conj[i], 1.0}, {ix.g_pos[i], -1.0}},
                 Sense::LessEqual, 0.0);
      spec.logic(tag("S_gp", l, 1), l, {{ix.g_pos[i + 1], 1.0}, {ix.g_pos[i], -1.0}},
                 Sense::LessEqual, 0.0);
      spec.logic(tag("S_gp", l, 2), l,
                 {{ix.g_pos[i], 1.0}, {ix.g_conj[i], -1.0}, {ix.g_pos[i + 1], -1.0}},
                 Sense::LessEqual, 0.0);
    }
  }
  spec.logic(tag("S_anchor", ix.k), ix.k, {{ix.g_pos[0], 1.0}}, Sense::Equal, 1.0);
}

void completion_cost(MptpEncoding& enc, double sampling_time) {
  const double Ts = sampling_time;
  enc.model.objective.clear();
  for (int id : enc.index.g_pos) enc.model.objective.push_back({id, Ts});
  enc.model.objective_constant = (enc.index.k - 1) * Ts;
  enc.model.objective_step = Ts;
}

MptpEncoding build_mptp(const MptpSetup& setup) {
  MptpEncoding enc = allocate_mptp(setup);
  encode_admissible(enc, setup);
  encode_safe(enc, setup);
  encode_spec(enc, setup);
  completion_cost(enc, setup.params.sampling_time);
  enc.model.validate();
  return enc;
}

std::vector<Vec3> extract_inputs(const MptpEncoding& enc, const Eigen::VectorXd& values) {
  std::vector<Vec3> out;
  for (const auto& ids : enc.index.u) {
    out.emplace_back(values(ids[0]), values(ids[1]), values(ids[2]));
  }
  return out;
}

int planned_completion_step(const MptpEncoding& enc, const Eigen::VectorXd& values) {
  double sum = 0.0;
  for (int id : enc.index.g_pos) sum += values(id);
  return enc.index.k - 1 + static_cast<int>(std::lround(sum));
}

std::vector<Vec6> rollout(const DecoyState& x0, int k, const std::vector<Vec3>& inputs,
                          const std::vector<Disturbance>& disturbances,
                          const PlanningParams& params) {
  std::vector<Vec6> states(k + 1, x0.stacked());
  DecoyState x = x0;
  for (std::size_t q = 0; q < inputs.size(); ++q) {
    const Disturbance w = q < disturbances.size() ? disturbances[q] : Disturbance{};
    x = decoy_plan_step(x, inputs[q], w, params);
    states.push_back(x.stacked());
  }
  return states;
}

}  // namespace decoy
