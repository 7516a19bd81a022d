#include "decoy/milp.hpp"

#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>

namespace decoy::milp {

namespace {

using detail::DenseSimplex;
using detail::LpData;
using detail::LpStatus;
using Clock = DenseSimplex::Clock;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long kLpIterationCap = 200000;
constexpr std::size_t kWarmStateBudget = 256u << 20;
constexpr int kDiveEvery = 200;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool is_integral_var(const Variable& v) {
  return v.kind == VarKind::Binary || v.branch_priority > 0;
}

double fractionality(double x) { return std::abs(x - std::round(x)); }

struct Brancher {
  const MilpModel& model;
  std::vector<int> integral;

  explicit Brancher(const MilpModel& m) : model(m) {
    for (std::size_t j = 0; j < m.variables.size(); ++j) {
      if (is_integral_var(m.variables[j])) integral.push_back(static_cast<int>(j));
    }
  }

  /// Highest priority class, then most fractional, then lowest id; -1 if integral.
  int select(const Eigen::VectorXd& x) const {
    int best = -1;
    int best_priority = 0;
    double best_frac = 0.0;
    for (int j : integral) {
      const double f = fractionality(x(j));
      if (f <= kIntegralityTol) continue;
      const int pr = model.variables[j].branch_priority;
      if (best < 0 || pr > best_priority ||
          (pr == best_priority && f > best_frac + 1e-12)) {
        best = j;
        best_priority = pr;
        best_frac = f;
      }
    }
    return best;
  }
};

struct Node {
  double bound = -kInf;
  long id = 0;
  int depth = 0;
  std::vector<double> lo, hi;
  std::shared_ptr<const DenseSimplex> warm;
};

struct NodeOrder {
  // Lowest bound first; deeper nodes, then older nodes, break ties.
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

class Solver {
 public:
  Solver(const MilpModel& model, const Limits& limits)
      : model_(model),
        limits_(limits),
        lp_(LpData::from_model(model)),
        brancher_(model),
        t0_(Clock::now()),
        deadline_(t0_ + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(limits.time_seconds))) {}

  Solution run();

 private:
  // Rounds an objective bound up to the next attainable objective value.
  double attainable(double bound) const {
    if (model_.objective_step <= 0.0 || !std::isfinite(bound)) return bound;
    const double steps =
        std::ceil((bound - model_.objective_constant) / model_.objective_step - 1e-6);
    return model_.objective_constant + steps * model_.objective_step;
  }
  bool prunable(double bound) const {
    return has_incumbent_ && attainable(bound) >= incumbent_obj_ - 1e-9;
  }
  LpStatus solve_lp(DenseSimplex& lp) {
    const long before = lp.iterations();
    const LpStatus st = lp.solve(kLpIterationCap, deadline_);
    lp_iterations_ += lp.iterations() - before;
    return st;
  }
  void offer(const Eigen::VectorXd& x);
  void polish(DenseSimplex lp);
  void dive(DenseSimplex lp);

  const MilpModel& model_;
  Limits limits_;
  std::shared_ptr<const LpData> lp_;
  Brancher brancher_;
  Clock::time_point t0_;
  Clock::time_point deadline_;
  long lp_iterations_ = 0;
  bool has_incumbent_ = false;
  double incumbent_obj_ = kInf;
  Eigen::VectorXd incumbent_;
};

void Solver::offer(const Eigen::VectorXd& x) {
  Eigen::VectorXd y = x;
  for (int j : brancher_.integral) y(j) = std::round(y(j));
  if (model_.max_row_violation(y) > kFeasibilityTol) return;
  const double obj = model_.objective_value(y);
  if (!has_incumbent_ || obj < incumbent_obj_ - 1e-12) {
    has_incumbent_ = true;
    incumbent_obj_ = obj;
    incumbent_ = y;
  }
}

// Fixes integral variables at their rounded values and re-solves so that the
// continuous part is consistent with exactly integral values.
void Solver::polish(DenseSimplex lp) {
  const Eigen::VectorXd x = lp.primal();
  for (int j : brancher_.integral) {
    const double r = std::clamp(std::round(x(j)), lp.lower(j), lp.upper(j));
    lp.set_bounds(j, r, r);
  }
  if (solve_lp(lp) == LpStatus::Optimal) offer(lp.primal());
}

// Repeatedly fixes the branching candidate at its nearest integer.
void Solver::dive(DenseSimplex lp) {
  for (std::size_t round = 0; round <= brancher_.integral.size(); ++round) {
    if (solve_lp(lp) != LpStatus::Optimal) return;
    const Eigen::VectorXd x = lp.primal();
    if (prunable(lp.objective() + model_.objective_constant)) return;
    const int j = brancher_.select(x);
    if (j < 0) {
      polish(lp);
      return;
    }
    const double r = std::floor(x(j) + 0.5);
    lp.set_bounds(j, r, r);
  }
}

Solution Solver::run() {
  Solution sol;
  const int n = lp_->n;
  Node root;
  root.lo.assign(lp_->col_lo.data(), lp_->col_lo.data() + n);
  root.hi.assign(lp_->col_hi.data(), lp_->col_hi.data() + n);

  if (lp_->trivially_infeasible) {
    sol.status = Status::Infeasible;
    sol.wall_time = seconds_since(t0_);
    return sol;
  }

  DenseSimplex root_lp(lp_);
  const LpStatus root_status = solve_lp(root_lp);
  if (root_status == LpStatus::Infeasible || root_status == LpStatus::Unbounded) {
    sol.status = root_status == LpStatus::Infeasible ? Status::Infeasible
                                                     : Status::Unbounded;
    sol.lp_iterations = lp_iterations_;
    sol.wall_time = seconds_since(t0_);
    return sol;
  }
  auto root_state = std::make_shared<const DenseSimplex>(root_lp);
  bool limit_hit = root_status != LpStatus::Optimal;
  double global_bound = -kInf;
  long nodes = 0;

  if (!limit_hit) {
    root.bound = root_lp.objective() + model_.objective_constant;
    root.warm = root_state;
    dive(root_lp);
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::size_t warm_bytes = 0;
  if (!limit_hit) open.push(std::move(root));

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.warm) warm_bytes -= node.warm->memory_bytes();
    global_bound = node.bound;
    if (prunable(node.bound)) continue;
    if (has_incumbent_ && limits_.relative_gap > 0.0 &&
        incumbent_obj_ - node.bound <=
            limits_.relative_gap * std::max(std::abs(incumbent_obj_), 1e-9)) {
      open.push(std::move(node));
      break;
    }
    if (nodes >= limits_.max_nodes || Clock::now() > deadline_) {
      open.push(std::move(node));
      limit_hit = true;
      break;
    }
    ++nodes;

    DenseSimplex lp(node.warm ? *node.warm : *root_state);
    for (int j = 0; j < n; ++j) {
      if (lp.lower(j) != node.lo[j] || lp.upper(j) != node.hi[j]) {
        lp.set_bounds(j, node.lo[j], node.hi[j]);
      }
    }
    node.warm.reset();
    const LpStatus st = solve_lp(lp);
    if (st == LpStatus::TimeLimit || st == LpStatus::IterationLimit) {
      open.push(std::move(node));
      limit_hit = true;
      break;
    }
    if (st != LpStatus::Optimal) continue;
    const double bound = std::max(node.bound, lp.objective() + model_.objective_constant);
    if (prunable(bound)) continue;
    const Eigen::VectorXd x = lp.primal();
    const int j = brancher_.select(x);
    if (j < 0) {
      polish(lp);
      continue;
    }
    if (nodes % kDiveEvery == 0) dive(lp);

    auto state = std::make_shared<const DenseSimplex>(std::move(lp));
    const bool keep = warm_bytes + 2 * state->memory_bytes() <= kWarmStateBudget;
    for (int side = 0; side < 2; ++side) {
      Node child;
      child.bound = bound;
      child.id = nodes * 2 + side;
      child.depth = node.depth + 1;
      child.lo = node.lo;
      child.hi = node.hi;
      if (side == 0) child.hi[j] = std::floor(x(j));
      else child.lo[j] = std::ceil(x(j));
      if (keep) {
        child.warm = state;
        warm_bytes += state->memory_bytes();
      }
      open.push(std::move(child));
    }
  }

  sol.nodes = nodes;
  sol.lp_iterations = lp_iterations_;
  sol.wall_time = seconds_since(t0_);
  if (has_incumbent_) {
    sol.values = incumbent_;
    sol.objective = incumbent_obj_;
  }
  if (open.empty()) {
    sol.status = has_incumbent_ ? Status::Optimal : Status::Infeasible;
    sol.bound = has_incumbent_ ? incumbent_obj_ : kInf;
    sol.gap = 0.0;
    return sol;
  }
  sol.bound = std::max(global_bound, open.top().bound);
  sol.bound = std::min(attainable(sol.bound), has_incumbent_ ? incumbent_obj_ : kInf);
  if (!has_incumbent_) {
    sol.status = Status::LimitHit;
    sol.gap = kInf;
    return sol;
  }
  sol.gap = (incumbent_obj_ - sol.bound) / std::max(std::abs(incumbent_obj_), 1e-9);
  sol.status = limit_hit || sol.gap > 1e-12 ? Status::LimitHit : Status::Optimal;
  if (!limit_hit && sol.gap <= limits_.relative_gap) sol.status = Status::Optimal;
  return sol;
}

}  // namespace

Solution lp_relax(const MilpModel& model) {
  model.validate();
  const auto t0 = Clock::now();
  Solution sol;
  auto lp = LpData::from_model(model);
  if (lp->trivially_infeasible) {
    sol.status = Status::Infeasible;
    return sol;
  }
  DenseSimplex simplex(lp);
  const LpStatus st = simplex.solve(kLpIterationCap, Clock::time_point::max());
  sol.lp_iterations = simplex.iterations();
  sol.wall_time = seconds_since(t0);
  switch (st) {
    case LpStatus::Optimal:
      sol.status = Status::Optimal;
      sol.values = simplex.primal();
      sol.objective = simplex.objective() + model.objective_constant;
      sol.bound = sol.objective;
      break;
    case LpStatus::Infeasible: sol.status = Status::Infeasible; break;
    case LpStatus::Unbounded: sol.status = Status::Unbounded; break;
    default: sol.status = Status::LimitHit; break;
  }
  return sol;
}

Solution solve(const MilpModel& model, const Limits& limits) {
  model.validate();
  return Solver(model, limits).run();
}

}  // namespace decoy::milp
