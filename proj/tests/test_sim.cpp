#include "support.hpp"

#include <doctest.h>

using namespace decoy;
using testsupport::uniform;

namespace {

Engagement head_on(const Vec3& threat_velocity, const Vec3& asset_velocity, double threat_z) {
  Engagement e;
  e.threat_position = Vec3(-10000, 0, threat_z);
  e.threat_velocity = threat_velocity;
  e.asset_velocity = asset_velocity;
  e.speed = threat_velocity.norm();
  e.jamming_constant = 105;
  return e;
}

struct PlannedPair {
  Scenario scenario;
  AllocationReport alloc;
  std::vector<DecoyPlan> plans;
};

PlannedPair planned_pair(std::mt19937_64& rng, int steps) {
  for (;;) {
    PlannedPair pp;
    pp.scenario = testsupport::pair_scenario(rng, steps);
    pp.alloc = allocate(pp.scenario);
    pp.plans = plan_all(pp.scenario, pp.alloc, {});
    if (pp.plans.at(0).ok()) return pp;
  }
}

}  // namespace

TEST_CASE("fake asset is the ground point behind the decoy") {
  CHECK((fake_asset_position(Vec3(100, 0, 500), Vec3(0, 0, 1000)) - Vec3(200, 0, 0)).norm() < 1e-9);
  CHECK((fake_asset_position(Vec3(30, -40, 0), Vec3(0, 0, 1000)) - Vec3(30, -40, 0)).norm() < 1e-9);
  const Vec3 f = fake_asset_position(Vec3(10, 20, 250), Vec3(-4000, 300, 3000));
  CHECK(f(2) == 0.0);
  // Collinear with threat and decoy.
  const Vec3 a = Vec3(10, 20, 250) - Vec3(-4000, 300, 3000);
  const Vec3 b = f - Vec3(-4000, 300, 3000);
  CHECK(a.cross(b).norm() < 1e-6 * a.norm() * b.norm());
  for (const Vec3& decoy : {Vec3(0, 0, 1000), Vec3(0, 0, 1200)}) {
    try {
      fake_asset_position(decoy, Vec3(0, 0, 1000));
      FAIL("expected NoIntersection");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoIntersection);
    }
  }
}

TEST_CASE("seduction input keeps the asset's Doppler shift") {
  PlanningParams p;
  DecoyState d;
  d.position = Vec3(0, 0, 500);
  // Threat along +x, asset at rest: pure lateral and vertical component.
  const Vec3 u = seduction_input(d, head_on(Vec3(274, 0, 0), Vec3::Zero(), 5000), p);
  CHECK((u - Vec3(0, 39, 39)).norm() < 1e-9);
  // Committed lure direction.
  const Vec3 lure = seduction_input(d, head_on(Vec3(274, 0, 0), Vec3::Zero(), 5000), p, Vec3(0, -1, 0));
  CHECK(lure(1) == doctest::Approx(-39.0));
  CHECK(std::abs(lure(0)) < 1e-9);

  std::mt19937_64 rng(131);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 zdot = 274.0 * testsupport::unit_vector(rng);
    const Vec3 va(uniform(rng, -5, 5), uniform(rng, -5, 5), 0);
    DecoyState dd;
    dd.position = Vec3(0, 0, uniform(rng, 100, 800));
    dd.velocity = Vec3(uniform(rng, -30, 30), uniform(rng, -30, 30), uniform(rng, -10, 10));
    const Engagement e = head_on(zdot, va, 5000);
    Vec3 got;
    try {
      got = seduction_input(dd, e, p);
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::EmptyFeasibleSet);
      continue;
    }
    const Vec3 dir = zdot.normalized();
    CHECK(dir.dot(got) == doctest::Approx(dir.dot(va)).epsilon(1e-9).scale(1.0));
    CHECK(got.lpNorm<Eigen::Infinity>() <= p.v_ref() + 1e-9);
    const double shift = doppler_shift(got, zdot, p.transmission_frequency, 274.0, p.speed_of_light);
    const double asset_shift = doppler_shift(va, zdot, p.transmission_frequency, 274.0, p.speed_of_light);
    CHECK(std::abs(shift - asset_shift) < 1e-6);
  }
}

TEST_CASE("seduction without an admissible climb rate is reported") {
  PlanningParams p;
  DecoyState d;
  d.position = Vec3(0, 0, 10);
  d.velocity = Vec3(0, 0, -40);
  try {
    seduction_input(d, head_on(Vec3(274, 0, 0), Vec3::Zero(), 5000), p);
    FAIL("expected EmptyFeasibleSet");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyFeasibleSet);
  }
}

TEST_CASE("low-level tracking stays within the disturbance boxes") {
  PlanningParams p;
  std::mt19937_64 rng(137);
  DecoyState x;
  x.position = Vec3(10, 20, 300);
  x.velocity = Vec3(1, 2, 3);
  for (int i = 0; i < 500; ++i) {
    const Vec3 cmd(uniform(rng, -39, 39), uniform(rng, -39, 39), uniform(rng, -39, 39));
    const TrackStep t = low_level_track(cmd, x, p, &rng);
    CHECK(t.disturbance.position.lpNorm<Eigen::Infinity>() <= p.beta_p);
    CHECK(t.disturbance.velocity.lpNorm<Eigen::Infinity>() <= p.beta_v);
    const DecoyState expect = decoy_plan_step(x, cmd, t.disturbance, p);
    CHECK((t.end.position - expect.position).norm() < 1e-12);
    CHECK((t.end.velocity - expect.velocity).norm() < 1e-12);
    REQUIRE(static_cast<int>(t.micro.size()) == p.micro_steps + 1);
    CHECK(t.micro.front().position == x.position);
    CHECK(t.micro.back().position == t.end.position);
  }
  const TrackStep exact = low_level_track(Vec3(5, 0, 0), x, p, nullptr);
  CHECK(exact.end.position == x.position + p.sampling_time * x.velocity);
  CHECK(exact.end.velocity == Vec3(5, 0, 0));
}

TEST_CASE("undisturbed open loop reproduces the plan") {
  std::mt19937_64 rng(139);
  for (int trial = 0; trial < 4; ++trial) {
    const PlannedPair pp = planned_pair(rng, 8);
    SimOptions opt;
    opt.disturbances = false;
    const SimResult r = run_open_loop(pp.scenario, pp.alloc, pp.plans, opt);
    const DecoyPlan& plan = pp.plans[0];
    const std::vector<Vec6> nominal =
        rollout(pp.scenario.decoys[plan.decoy], 0, plan.inputs, {}, pp.scenario.params);
    REQUIRE(r.steps() == pp.scenario.params.horizon_steps);
    for (int l = 0; l <= r.steps(); ++l) {
      CHECK((r.decoys[plan.decoy][l] - nominal[l]).norm() < 1e-9);
    }
    // The plan is robust, so the nominal run may finish early but not late.
    REQUIRE(r.completion[plan.decoy].has_value());
    CHECK(*r.completion[plan.decoy] <= plan.planned_completion);
    CHECK(r.violations.empty());
    // The unassigned decoy does not move.
    CHECK(r.decoys[1].back().head<3>() == pp.scenario.decoys[1].position);
  }
}

TEST_CASE("disturbed open loop keeps the guarantees") {
  std::mt19937_64 rng(149);
  const PlannedPair pp = planned_pair(rng, 8);
  const int decoy = pp.plans[0].decoy;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    SimOptions opt;
    opt.seed = seed;
    const SimResult r = run_open_loop(pp.scenario, pp.alloc, pp.plans, opt);
    INFO("seed " << seed);
    CHECK(r.violations.empty());
    REQUIRE(r.completion[decoy].has_value());
    CHECK(*r.completion[decoy] <= pp.plans[0].planned_completion);
    CHECK(r.min_distance > pp.scenario.params.decoy_diameter);
  }
}

TEST_CASE("open loop requires a plan for every assigned decoy") {
  std::mt19937_64 rng(151);
  const PlannedPair pp = planned_pair(rng, 6);
  try {
    run_open_loop(pp.scenario, pp.alloc, {}, {});
    FAIL("expected Usage");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Usage);
  }
}

TEST_CASE("closed loop positions and diverts a single threat") {
  std::mt19937_64 rng(157);
  PlannedPair pp = planned_pair(rng, 10);
  pp.scenario.episode_time = 50.0;
  const SimResult r = run_closed_loop(pp.scenario, pp.alloc, {});
  const int decoy = pp.plans[0].decoy;
  CHECK(r.violations.empty());
  REQUIRE(r.completion[decoy].has_value());
  CHECK(r.switch_step[decoy] >= 0);
  CHECK(*r.completion[decoy] <= r.switch_step[decoy]);
  CHECK(r.diverted[0]);
  CHECK(r.seducer[0].back() == decoy);
  CHECK(r.fake_asset_distance[0] > 0.0);
  // Recomputing completion from the log is idempotent.
  CHECK(logged_completion(r, pp.scenario) == r.completion);
}
