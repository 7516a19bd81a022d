#include "decoy/planner.hpp"

#include <future>
#include <sstream>

namespace decoy {

AllocationReport allocate(const Scenario& scenario) {
  const int m = static_cast<int>(scenario.decoys.size());
  const int n = static_cast<int>(scenario.threats.size());
  const PlanningParams& p = scenario.params;
  AllocationReport r;
  for (const Threat& threat : scenario.threats) {
    r.targets.push_back(target_jamming_location(scenario.asset, threat));
  }
  r.weights.resize(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      r.weights(i, j) = inf_norm(r.targets[j].location - scenario.decoys[i].position);
    }
  }
  r.assignment = sequential_bottleneck(r.weights);
  for (const OrderRecord& rec : r.assignment.orders) {
    const double est = estimate_positioning_time(rec.weight, p.v_ref(), p.sampling_time);
    r.estimated_times.push_back(est);
    const double viable = r.targets[rec.task].viability_time;
    if (!(est < viable)) {
      std::ostringstream os;
      os << "decoy " << rec.agent << " cannot reach the target of threat " << rec.task
         << " in time (estimate " << est << " s, viability " << viable << " s)";
      throw Error(ErrorCode::InfeasibleAssignment, os.str());
    }
  }
  std::vector<Vec3> positions;
  for (const DecoyState& d : scenario.decoys) positions.push_back(d.position);
  std::vector<Vec3> locations;
  for (const JammingTarget& t : r.targets) locations.push_back(t.location);
  r.safe_sets = make_safe_sets(positions, locations, r.assignment, p.decoy_diameter,
                               p.v_ref(), p.sampling_time);
  return r;
}

MptpSetup make_setup(const Scenario& scenario, const AllocationReport& alloc,
                     int order_index, const DecoyState& x0, int k,
                     const Asset& asset_now, const Threat& threat_now) {
  const OrderRecord& rec = alloc.assignment.orders.at(order_index);
  MptpSetup setup;
  setup.x0 = x0;
  setup.k = k;
  setup.params = scenario.params;
  setup.safe = alloc.safe_sets.decoys.at(rec.agent);
  const double Ts = scenario.params.sampling_time;
  setup.engagement = [asset_now, threat_now, k, Ts](int l) {
    return predict_engagement(asset_now, threat_now, (l - k) * Ts);
  };
  return setup;
}

DecoyPlan solve_plan(const MptpSetup& setup, const SolverOptions& options) {
  DecoyPlan plan;
  plan.k = setup.k;
  try {
    const MptpEncoding enc = build_mptp(setup);
    plan.binaries = enc.auxiliary_binaries();
    plan.continuous_aux = enc.auxiliary_continuous();
    plan.solution = options.kind == SolverKind::External
                        ? milp::solve_external(enc.model, options.external_command,
                                               options.limits)
                        : milp::solve(enc.model, options.limits);
    if (plan.solution.has_incumbent()) {
      plan.inputs = extract_inputs(enc, plan.solution.values);
      plan.planned_completion = planned_completion_step(enc, plan.solution.values);
    } else {
      plan.error = std::string("no feasible plan (") + milp::to_string(plan.solution.status) + ")";
    }
  } catch (const Error& e) {
    plan.error = e.what();
  }
  return plan;
}

std::vector<DecoyPlan> plan_all(const Scenario& scenario, const AllocationReport& alloc,
                                const SolverOptions& options) {
  std::vector<std::future<DecoyPlan>> jobs;
  for (std::size_t l = 0; l < alloc.assignment.orders.size(); ++l) {
    const OrderRecord& rec = alloc.assignment.orders[l];
    MptpSetup setup = make_setup(scenario, alloc, static_cast<int>(l),
                                 scenario.decoys[rec.agent], 0, scenario.asset,
                                 scenario.threats[rec.task]);
    jobs.push_back(std::async(std::launch::async, [setup, options, rec] {
      DecoyPlan plan = solve_plan(setup, options);
      plan.order = rec.order;
      plan.decoy = rec.agent;
      plan.threat = rec.task;
      return plan;
    }));
  }
  std::vector<DecoyPlan> plans;
  for (auto& job : jobs) plans.push_back(job.get());
  return plans;
}

}  // namespace decoy
