#include "decoy/assignment.hpp"

#include "decoy/core.hpp"

#include <algorithm>
#include <sstream>

namespace decoy {

namespace {

// Kuhn's augmenting-path matching of tasks into agents over edges with
// weight <= threshold.
class ThresholdMatcher {
 public:
  ThresholdMatcher(const Eigen::MatrixXd& w, const EdgeMask& allowed,
                   double threshold)
      : w_(w), allowed_(allowed), threshold_(threshold) {}

  bool perfect(std::vector<int>* agent_of_task) {
    const int m = static_cast<int>(w_.rows());
    const int n = static_cast<int>(w_.cols());
    task_of_agent_.assign(m, -1);
    for (int j = 0; j < n; ++j) {
      seen_.assign(m, false);
      if (!augment(j)) return false;
    }
    if (agent_of_task) {
      agent_of_task->assign(n, -1);
      for (int i = 0; i < m; ++i) {
        if (task_of_agent_[i] >= 0) (*agent_of_task)[task_of_agent_[i]] = i;
      }
    }
    return true;
  }

 private:
  bool augment(int task) {
    for (int i = 0; i < w_.rows(); ++i) {
      if (seen_[i] || !allowed_(i, task) || w_(i, task) > threshold_) continue;
      seen_[i] = true;
      if (task_of_agent_[i] < 0 || augment(task_of_agent_[i])) {
        task_of_agent_[i] = task;
        return true;
      }
    }
    return false;
  }

  const Eigen::MatrixXd& w_;
  const EdgeMask& allowed_;
  double threshold_;
  std::vector<int> task_of_agent_;
  std::vector<bool> seen_;
};

bool try_bottleneck(const Eigen::MatrixXd& w, const EdgeMask& allowed,
                    BottleneckResult* out) {
  std::vector<double> levels;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (allowed(i, j)) levels.push_back(w(i, j));
    }
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (w.cols() == 0) {
    out->value = 0.0;
    out->agent_of_task.clear();
    return true;
  }
  if (levels.empty() ||
      !ThresholdMatcher(w, allowed, levels.back()).perfect(nullptr)) {
    return false;
  }
  std::size_t lo = 0;
  std::size_t hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (ThresholdMatcher(w, allowed, levels[mid]).perfect(nullptr)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  out->value = levels[lo];
  ThresholdMatcher(w, allowed, levels[lo]).perfect(&out->agent_of_task);
  return true;
}

}  // namespace

BottleneckResult bottleneck_assignment(const Eigen::MatrixXd& weights,
                                       const EdgeMask& allowed) {
  BottleneckResult result;
  if (!try_bottleneck(weights, allowed, &result)) {
    throw Error(ErrorCode::InfeasibleAssignment,
                "no assignment covers every task with the allowed edges");
  }
  return result;
}

BottleneckResult bottleneck_assignment(const Eigen::MatrixXd& weights) {
  return bottleneck_assignment(
      weights, EdgeMask::Constant(weights.rows(), weights.cols(), true));
}

std::vector<Edge> bottleneck_edge_set(const Eigen::MatrixXd& weights,
                                      const EdgeMask& allowed) {
  const double value = bottleneck_assignment(weights, allowed).value;
  std::vector<Edge> edges;
  for (int i = 0; i < weights.rows(); ++i) {
    for (int j = 0; j < weights.cols(); ++j) {
      if (allowed(i, j) && weights(i, j) == value) edges.emplace_back(i, j);
    }
  }
  return edges;
}

MarginResult robustness_margin(const Eigen::MatrixXd& weights,
                               const std::vector<int>& agents,
                               const std::vector<int>& tasks) {
  if (agents.empty() || tasks.empty()) {
    throw Error(ErrorCode::EmptyEdgeSet, "robustness margin of empty subgraph");
  }
  const int m = static_cast<int>(agents.size());
  const int n = static_cast<int>(tasks.size());
  Eigen::MatrixXd sub(m, n);
  for (int a = 0; a < m; ++a) {
    for (int t = 0; t < n; ++t) sub(a, t) = weights(agents[a], tasks[t]);
  }
  MarginResult result;
  if (m == 1 && n == 1) {
    result.edge = {agents[0], tasks[0]};
    result.margin = kInfiniteMargin;
    return result;
  }
  EdgeMask allowed = EdgeMask::Constant(m, n, true);
  const double base = bottleneck_assignment(sub, allowed).value;
  double best = -1.0;
  for (const Edge& e : bottleneck_edge_set(sub, allowed)) {
    allowed(e.first, e.second) = false;
    BottleneckResult without;
    const double value = try_bottleneck(sub, allowed, &without)
                             ? without.value
                             : kInfiniteMargin;
    allowed(e.first, e.second) = true;
    // Row-major scan keeps the smallest (agent, task) on ties.
    if (value > best) {
      best = value;
      result.edge = {agents[e.first], tasks[e.second]};
    }
  }
  result.margin = best - base;
  return result;
}

double SequentialAssignment::min_margin() const {
  double m = kInfiniteMargin;
  for (const OrderRecord& r : orders) m = std::min(m, r.margin);
  return m;
}

int SequentialAssignment::order_index_of_agent(int agent) const {
  for (std::size_t l = 0; l < orders.size(); ++l) {
    if (orders[l].agent == agent) return static_cast<int>(l);
  }
  return -1;
}

int SequentialAssignment::agent_of_task(int task) const {
  for (const OrderRecord& r : orders) {
    if (r.task == task) return r.agent;
  }
  return -1;
}

SequentialAssignment sequential_bottleneck(const Eigen::MatrixXd& weights) {
  const int m = static_cast<int>(weights.rows());
  const int n = static_cast<int>(weights.cols());
  if (m < n) {
    std::ostringstream os;
    os << "assignment needs at least as many agents as tasks (" << m << " < "
       << n << ")";
    throw Error(ErrorCode::InfeasibleAssignment, os.str());
  }
  if (!weights.allFinite() || (n > 0 && weights.minCoeff() < 0.0)) {
    throw Error(ErrorCode::InfeasibleAssignment,
                "assignment weights must be finite and nonnegative");
  }
  std::vector<int> agents(m);
  std::vector<int> tasks(n);
  for (int i = 0; i < m; ++i) agents[i] = i;
  for (int j = 0; j < n; ++j) tasks[j] = j;

  SequentialAssignment result;
  for (int l = 1; l <= n; ++l) {
    const MarginResult mr = robustness_margin(weights, agents, tasks);
    OrderRecord rec;
    rec.order = l;
    rec.agent = mr.edge.first;
    rec.task = mr.edge.second;
    rec.weight = weights(rec.agent, rec.task);
    rec.margin = mr.margin;
    result.orders.push_back(rec);
    agents.erase(std::find(agents.begin(), agents.end(), rec.agent));
    tasks.erase(std::find(tasks.begin(), tasks.end(), rec.task));
  }
  result.unassigned = agents;
  return result;
}

}  // namespace decoy
