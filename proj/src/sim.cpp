#include "decoy/sim.hpp"

#include "decoy/ltl.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace decoy {

namespace {

constexpr double kLogTolerance = 1e-6;
constexpr double kMonitorTolerance = 1e-6;
// Seduction keeps the decoy at least this far below the threat.
constexpr double kThreatClearance = 50.0;
// Window over which a diverted threat must keep pointing away from the asset.
constexpr double kDivertWindow = 10.0;

Vec3 nan3() { return Vec3::Constant(std::numeric_limits<double>::quiet_NaN()); }

double uniform(std::mt19937_64& rng, double bound) {
  return std::uniform_real_distribution<double>(-bound, bound)(rng);
}

// Angle between the threat heading and the line of sight to a point.
double heading_error(const Vec3& velocity, const Vec3& threat, const Vec3& point) {
  const Vec3 los = point - threat;
  const double denom = velocity.norm() * los.norm();
  if (!(denom > 0.0)) return 0.0;
  return std::acos(std::clamp(velocity.dot(los) / denom, -1.0, 1.0));
}

// Mutable world state shared by both loops.
class World {
 public:
  World(const Scenario& scenario, const AllocationReport& alloc, SimMode mode,
        const SimOptions& options)
      : sc_(scenario), alloc_(alloc), p_(scenario.params), rng_(options.seed),
        disturb_(options.disturbances), moving_asset_(mode == SimMode::ClosedLoop) {
    const int m = static_cast<int>(sc_.decoys.size());
    const int n = static_cast<int>(sc_.threats.size());
    r_.mode = mode;
    r_.params = p_;
    r_.asset_velocity = sc_.asset.velocity;
    r_.decoys.assign(m, {});
    r_.threat_pos.assign(n, {});
    r_.threat_vel.assign(n, {});
    r_.seducer.assign(n, {});
    r_.fake_assets.assign(n, {});
    r_.assigned_threat.assign(m, -1);
    for (const OrderRecord& rec : alloc_.assignment.orders) r_.assigned_threat[rec.agent] = rec.task;
    r_.planned_completion.assign(m, -1);
    r_.switch_step.assign(m, -1);
    r_.diverted.assign(n, false);
    r_.fake_asset_distance.assign(n, std::numeric_limits<double>::quiet_NaN());
    decoys_ = sc_.decoys;
    threats_ = sc_.threats;
    for (Threat& t : threats_) t.guidance = GuidanceTarget{};
    asset_ = sc_.asset.position;
    impacted_.assign(n, false);
    divert_ok_.assign(n, true);
    divert_seen_.assign(n, false);
    fake_.assign(n, nan3());
  }

  SimResult& result() { return r_; }
  const DecoyState& decoy(int i) const { return decoys_[i]; }
  const Threat& threat(int j) const { return threats_[j]; }
  Asset asset_now() const { return Asset{asset_, sc_.asset.velocity}; }

  Vec3 threat_velocity_now(int j) const {
    if (impacted_[j]) return Vec3::Zero();
    return threat_velocity(threats_[j], guidance_point(j, decoys_));
  }

  Engagement engagement_now(int j) const {
    Engagement e;
    e.threat_position = threats_[j].position;
    e.threat_velocity = threat_velocity_now(j);
    e.asset_position = asset_;
    e.asset_velocity = sc_.asset.velocity;
    e.speed = threats_[j].speed;
    e.jamming_constant = threats_[j].jamming_constant;
    return e;
  }

  void log_sample(int step) {
    r_.times.push_back(step * p_.sampling_time);
    r_.asset.push_back(asset_);
    for (std::size_t i = 0; i < decoys_.size(); ++i) r_.decoys[i].push_back(decoys_[i].stacked());
    for (std::size_t j = 0; j < threats_.size(); ++j) {
      r_.threat_pos[j].push_back(threats_[j].position);
      r_.threat_vel[j].push_back(threat_velocity_now(static_cast<int>(j)));
    }
  }

  void log_guidance() {
    for (std::size_t j = 0; j < threats_.size(); ++j) {
      const GuidanceTarget& g = threats_[j].guidance;
      r_.seducer[j].push_back(g.kind == GuidanceKind::FakeAsset ? g.decoy : -1);
      r_.fake_assets[j].push_back(fake_[j]);
    }
  }

  void start_seduction(int decoy, int threat, int step) {
    threats_[threat].guidance = GuidanceTarget{GuidanceKind::FakeAsset, decoy};
    r_.switch_step[decoy] = step;
    try {
      fake_[threat] = fake_asset_position(decoys_[decoy].position, threats_[threat].position);
    } catch (const Error& e) {
      event(step, std::string("fake asset undefined at switch: ") + e.what());
    }
    std::ostringstream os;
    os << "decoy " << decoy << " completes positioning and lures threat " << threat;
    event(step, os.str());
  }

  void event(int step, std::string text) { r_.events.push_back({step, std::move(text)}); }

  /// Advances every entity over one sampling interval with the given
  /// commands (one per decoy; unset keeps an unassigned decoy parked).
  void advance(int step, const std::vector<std::optional<Vec3>>& commands, double end_time) {
    const int m = static_cast<int>(decoys_.size());
    const int M = std::max(1, p_.micro_steps);
    const double Ts = p_.sampling_time;
    const double dt = Ts / M;
    std::vector<TrackStep> tracks(m);
    for (int i = 0; i < m; ++i) {
      if (commands[i]) {
        tracks[i] = low_level_track(*commands[i], decoys_[i], p_, disturb_ ? &rng_ : nullptr);
      } else {
        tracks[i].end = decoys_[i];
        tracks[i].micro.assign(M + 1, decoys_[i]);
      }
    }
    double step_min = std::numeric_limits<double>::infinity();
    std::vector<Vec3> micro_pos(m);
    for (int q = 0; q <= M; ++q) {
      for (int i = 0; i < m; ++i) micro_pos[i] = tracks[i].micro[q].position;
      step_min = std::min(step_min, separation(step, micro_pos, q == 0));
      if (q == M) break;
      const double t = step * Ts + q * dt;
      advance_threats(step, t, dt, micro_pos, end_time);
      if (moving_asset_) asset_ += dt * sc_.asset.velocity;
    }
    for (int i = 0; i < m; ++i) decoys_[i] = tracks[i].end;
    r_.min_distance_per_step.push_back(step_min);
  }

  void finish(int last_step) {
    std::vector<Vec3> pos;
    for (const DecoyState& d : decoys_) pos.push_back(d.position);
    r_.min_distance_per_step.push_back(separation(last_step, pos, true));
    r_.min_distance = *std::min_element(r_.min_distance_per_step.begin(),
                                        r_.min_distance_per_step.end());
    log_guidance();
    for (std::size_t j = 0; j < threats_.size(); ++j) {
      r_.diverted[j] = divert_seen_[j] && divert_ok_[j];
      if (!std::isnan(fake_[j](0))) r_.fake_asset_distance[j] = (fake_[j] - asset_).norm();
    }
  }

  void monitor_safe_sets(int step) {
    const double t = step * p_.sampling_time;
    for (std::size_t i = 0; i < decoys_.size(); ++i) {
      const int sw = r_.switch_step[i];
      if (sw >= 0 && step > sw) continue;
      const Box box = safe_box(alloc_.safe_sets.decoys[i], t);
      if (!box.contains(decoys_[i].position, kMonitorTolerance)) {
        SafetyViolation v;
        v.kind = SafetyViolation::Kind::OutsideSafeSet;
        v.decoy = static_cast<int>(i);
        r_.violations.push_back({step, t, v});
      }
    }
  }

 private:
  Vec3 guidance_point(int j, const std::vector<DecoyState>& decoys) const {
    const GuidanceTarget& g = threats_[j].guidance;
    if (g.kind == GuidanceKind::FakeAsset && !std::isnan(fake_[j](0))) {
      try {
        return fake_asset_position(decoys[g.decoy].position, threats_[j].position);
      } catch (const Error&) {
        return fake_[j];
      }
    }
    return asset_;
  }

  double separation(int step, const std::vector<Vec3>& pos, bool sample) {
    double best = std::numeric_limits<double>::infinity();
    const int m = static_cast<int>(pos.size());
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        const double dist = inf_norm(pos[a] - pos[b]);
        best = std::min(best, dist);
        if (dist <= p_.decoy_diameter && (sample || !close_logged(step, a, b))) {
          SafetyViolation v;
          v.kind = SafetyViolation::Kind::TooClose;
          v.decoy = a;
          v.other = b;
          v.distance = dist;
          r_.violations.push_back({step, step * p_.sampling_time, v});
        }
      }
    }
    return best;
  }

  bool close_logged(int step, int a, int b) const {
    for (const MonitorViolation& v : r_.violations) {
      if (v.step == step && v.violation.kind == SafetyViolation::Kind::TooClose &&
          v.violation.decoy == a && v.violation.other == b) {
        return true;
      }
    }
    return false;
  }

  void advance_threats(int step, double t, double dt, const std::vector<Vec3>& micro_pos,
                       double end_time) {
    for (std::size_t j = 0; j < threats_.size(); ++j) {
      if (impacted_[j]) continue;
      Threat& th = threats_[j];
      Vec3 goal = asset_;
      if (th.guidance.kind == GuidanceKind::FakeAsset) {
        try {
          fake_[j] = fake_asset_position(micro_pos[th.guidance.decoy], th.position);
        } catch (const Error& e) {
          if (!fake_lost_logged_) {
            event(step, std::string("fake asset lost, keeping last aim point: ") + e.what());
            fake_lost_logged_ = true;
          }
        }
        goal = fake_[j];
      }
      if ((goal - th.position).norm() <= th.speed * dt) {
        th.position = goal;
        impacted_[j] = true;
        std::ostringstream os;
        os << "threat " << j << " reaches its aim point";
        event(step, os.str());
        continue;
      }
      const Vec3 vel = threat_velocity(th, goal);
      if (t >= end_time - kDivertWindow - 1e-9) {
        divert_seen_[j] = true;
        if (!(heading_error(vel, th.position, asset_) > p_.cone_half_angle)) divert_ok_[j] = false;
      }
      th.position += dt * vel;
    }
  }

  const Scenario& sc_;
  const AllocationReport& alloc_;
  PlanningParams p_;
  std::mt19937_64 rng_;
  bool disturb_;
  bool moving_asset_;
  SimResult r_;
  std::vector<DecoyState> decoys_;
  std::vector<Threat> threats_;
  Vec3 asset_;
  std::vector<bool> impacted_, divert_ok_, divert_seen_;
  std::vector<Vec3> fake_;
  bool fake_lost_logged_ = false;
};

int steps_for(double time, double sampling_time) {
  return static_cast<int>(std::ceil(time / sampling_time - 1e-9));
}

}  // namespace

Disturbance sample_disturbance(const PlanningParams& params, std::mt19937_64* rng) {
  Disturbance w;
  if (!rng) return w;
  for (int a = 0; a < 3; ++a) w.position(a) = uniform(*rng, params.beta_p);
  for (int a = 0; a < 3; ++a) w.velocity(a) = uniform(*rng, params.beta_v);
  return w;
}

TrackStep low_level_track(const Vec3& command, const DecoyState& state,
                          const PlanningParams& params, std::mt19937_64* rng) {
  TrackStep out;
  out.disturbance = sample_disturbance(params, rng);
  out.end = decoy_plan_step(state, command, out.disturbance, params);
  const int M = std::max(1, params.micro_steps);
  out.micro.reserve(M + 1);
  for (int q = 0; q <= M; ++q) {
    const double s = static_cast<double>(q) / M;
    DecoyState x;
    x.position = state.position + s * (out.end.position - state.position);
    x.velocity = q == M ? out.end.velocity : state.velocity;
    out.micro.push_back(x);
  }
  return out;
}

Vec3 fake_asset_position(const Vec3& decoy, const Vec3& threat) {
  if (!(decoy(2) < threat(2))) {
    throw Error(ErrorCode::NoIntersection,
                "decoy is not below the threat; the line of sight misses the ground");
  }
  const double lambda = threat(2) / (threat(2) - decoy(2));
  Vec3 out = threat + lambda * (decoy - threat);
  out(2) = 0.0;
  return out;
}

Vec3 seduction_input(const DecoyState& decoy, const Engagement& engagement,
                     const PlanningParams& params, const Vec3& preferred) {
  const double s = engagement.threat_velocity.norm();
  if (!(s > 0.0)) throw Error(ErrorCode::DegenerateDirection, "threat is not moving");
  const Vec3 dir = engagement.threat_velocity / s;
  const double c = dir.dot(engagement.asset_velocity);
  const double vr = params.v_ref();
  const double Ts = params.sampling_time;
  const double bp = params.beta_p;
  const double bv = params.beta_v;
  // Position two samples ahead is p + Ts*v + Ts*(u + w_v) + two position
  // disturbances; bound its altitude from both sides.
  const double drift = decoy.position(2) + Ts * decoy.velocity(2);
  const double floor_z = (0.5 * params.decoy_diameter + 2.0 * bp - drift) / Ts + bv;
  const double threat_z =
      engagement.threat_position(2) + 2.0 * Ts * std::min(0.0, engagement.threat_velocity(2));
  const double ceil_z = (threat_z - kThreatClearance - 2.0 * bp - drift) / Ts - bv;
  Vec3 lo(-vr, -vr, std::max(-vr, floor_z));
  Vec3 hi(vr, vr, std::min(vr, ceil_z));
  if (lo(2) > hi(2)) {
    throw Error(ErrorCode::EmptyFeasibleSet, "no admissible climb rate for seduction");
  }
  // Both objectives (|u - c dir|^2, or its projection on a committed
  // direction) are convex on the polygon plane ∩ box, so the maximum sits at
  // a vertex; vertices lie on box edges.
  Vec3 along = preferred - dir.dot(preferred) * dir;
  const bool committed = along.norm() > 1e-9 * std::max(1.0, preferred.norm());
  if (committed) along.normalize();
  constexpr double kTol = 1e-9;
  std::optional<Vec3> best;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dir(a)) < 1e-12) continue;
    const int b = (a + 1) % 3;
    const int e = (a + 2) % 3;
    for (const double ub : {lo(b), hi(b)}) {
      for (const double ue : {lo(e), hi(e)}) {
        Vec3 u;
        u(b) = ub;
        u(e) = ue;
        u(a) = (c - dir(b) * ub - dir(e) * ue) / dir(a);
        if (u(a) < lo(a) - kTol || u(a) > hi(a) + kTol) continue;
        u(a) = std::clamp(u(a), lo(a), hi(a));
        const double val = committed ? (u - c * dir).dot(along) : (u - c * dir).squaredNorm();
        const double tie = kTol * std::max(1.0, std::abs(best_val));
        const bool better =
            !best || val > best_val + tie ||
            (val >= best_val - tie &&
             std::lexicographical_compare(best->data(), best->data() + 3, u.data(), u.data() + 3));
        if (better) {
          best = u;
          best_val = std::max(val, best_val);
        }
      }
    }
  }
  if (!best) {
    throw Error(ErrorCode::EmptyFeasibleSet, "Doppler plane misses the input box");
  }
  return *best;
}

Engagement SimResult::engagement(const Scenario& scenario, int threat, int step) const {
  Engagement e;
  e.threat_position = threat_pos.at(threat).at(step);
  e.threat_velocity = threat_vel.at(threat).at(step);
  e.asset_position = asset.at(step);
  e.asset_velocity = asset_velocity;
  e.speed = scenario.threats.at(threat).speed;
  e.jamming_constant = scenario.threats.at(threat).jamming_constant;
  return e;
}

std::vector<std::optional<int>> logged_completion(const SimResult& result,
                                                  const Scenario& scenario) {
  std::vector<std::optional<int>> out(result.decoys.size());
  for (std::size_t i = 0; i < result.decoys.size(); ++i) {
    const int j = result.assigned_threat[i];
    if (j < 0) continue;
    ltl::AtomTable table;
    table.tolerance = kLogTolerance;
    ltl::add_positioning_atoms(
        table, j, [&result, &scenario, j](int l) { return result.engagement(scenario, j, l); },
        result.params);
    out[i] = ltl::first_satisfaction_step(result.decoys[i], table, j, 0);
  }
  return out;
}

SimResult run_open_loop(const Scenario& scenario, const AllocationReport& alloc,
                        const std::vector<DecoyPlan>& plans, const SimOptions& options) {
  World world(scenario, alloc, SimMode::OpenLoop, options);
  const int m = static_cast<int>(scenario.decoys.size());
  const int N = scenario.params.horizon_steps;
  std::vector<const DecoyPlan*> by_decoy(m, nullptr);
  for (const DecoyPlan& plan : plans) {
    if (plan.decoy < 0 || plan.decoy >= m) {
      throw Error(ErrorCode::Usage, "plan refers to an unknown decoy");
    }
    by_decoy[plan.decoy] = &plan;
    world.result().planned_completion[plan.decoy] = plan.planned_completion;
  }
  for (int i = 0; i < m; ++i) {
    if (world.result().assigned_threat[i] >= 0 && !(by_decoy[i] && by_decoy[i]->ok())) {
      std::ostringstream os;
      os << "no plan for assigned decoy " << i;
      throw Error(ErrorCode::Usage, os.str());
    }
  }
  const double end_time = N * scenario.params.sampling_time;
  for (int k = 0; k < N; ++k) {
    world.log_sample(k);
    world.log_guidance();
    world.monitor_safe_sets(k);
    std::vector<std::optional<Vec3>> commands(m);
    for (int i = 0; i < m; ++i) {
      if (!by_decoy[i]) continue;
      const DecoyPlan& plan = *by_decoy[i];
      const int idx = k - plan.k;
      commands[i] = idx >= 0 && idx < static_cast<int>(plan.inputs.size())
                        ? plan.inputs[idx]
                        : Vec3::Zero();
    }
    world.advance(k, commands, end_time);
  }
  world.log_sample(N);
  world.monitor_safe_sets(N);
  world.finish(N);
  SimResult out = std::move(world.result());
  out.completion = logged_completion(out, scenario);
  return out;
}

SimResult run_closed_loop(const Scenario& scenario, const AllocationReport& alloc,
                          const SimOptions& options) {
  World world(scenario, alloc, SimMode::ClosedLoop, options);
  const PlanningParams& p = scenario.params;
  const int m = static_cast<int>(scenario.decoys.size());
  const int N = p.horizon_steps;
  const int K = steps_for(scenario.episode_time, p.sampling_time);
  const double end_time = K * p.sampling_time;
  std::vector<std::optional<DecoyPlan>> current(m);
  std::vector<Vec3> last_input(m, Vec3::Zero());
  std::vector<Vec3> lure_dir(m, Vec3::Zero());
  for (int k = 0; k < K; ++k) {
    world.log_sample(k);
    SimResult& r = world.result();
    // Re-plan every positioning decoy from the current states.
    std::vector<std::pair<int, std::future<DecoyPlan>>> jobs;
    if (k < N) {
      for (std::size_t l = 0; l < alloc.assignment.orders.size(); ++l) {
        const OrderRecord& rec = alloc.assignment.orders[l];
        if (r.switch_step[rec.agent] >= 0) continue;
        Threat threat_now = world.threat(rec.task);
        MptpSetup setup = make_setup(scenario, alloc, static_cast<int>(l), world.decoy(rec.agent),
                                     k, world.asset_now(), threat_now);
        const SolverOptions solver = options.solver;
        jobs.emplace_back(rec.agent, std::async(std::launch::async, [setup, solver, rec] {
                            DecoyPlan plan = solve_plan(setup, solver);
                            plan.order = rec.order;
                            plan.decoy = rec.agent;
                            plan.threat = rec.task;
                            return plan;
                          }));
      }
    }
    std::vector<std::optional<Vec3>> commands(m);
    for (auto& [i, job] : jobs) {
      DecoyPlan plan = job.get();
      if (plan.ok()) {
        if (k == 0) r.planned_completion[i] = plan.planned_completion;
        current[i] = std::move(plan);
      } else {
        std::ostringstream os;
        os << "re-plan of decoy " << i << " failed (" << plan.error
           << "), applying the previous plan";
        world.event(k, os.str());
      }
    }
    for (int i = 0; i < m; ++i) {
      const int j = r.assigned_threat[i];
      if (j < 0) continue;
      if (r.switch_step[i] < 0 && current[i] && current[i]->planned_completion == k &&
          current[i]->k == k) {
        world.start_seduction(i, j, k);
      }
      Vec3 u = Vec3::Zero();
      if (r.switch_step[i] >= 0) {
        try {
          const Engagement e = world.engagement_now(j);
          u = seduction_input(world.decoy(i), e, p, lure_dir[i]);
          if (lure_dir[i].isZero()) {
            const Vec3 dir = e.threat_velocity.normalized();
            lure_dir[i] = u - dir.dot(u) * dir;
          }
        } catch (const Error& e) {
          u = last_input[i];
          world.event(k, std::string("seduction input unavailable: ") + e.what());
        }
      } else if (current[i]) {
        const int idx = k - current[i]->k;
        if (idx >= 0 && idx < static_cast<int>(current[i]->inputs.size())) {
          u = current[i]->inputs[idx];
        }
      }
      commands[i] = u;
      last_input[i] = u;
    }
    world.log_guidance();
    if (k <= N) world.monitor_safe_sets(k);
    world.advance(k, commands, end_time);
  }
  world.log_sample(K);
  if (K <= N) world.monitor_safe_sets(K);
  world.finish(K);
  SimResult out = std::move(world.result());
  out.completion = logged_completion(out, scenario);
  return out;
}

}  // namespace decoy
