#ifndef DECOY_ASSIGNMENT_HPP
#define DECOY_ASSIGNMENT_HPP

#include <Eigen/Dense>

#include <limits>
#include <utility>
#include <vector>

namespace decoy {

using EdgeMask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Edge = std::pair<int, int>;  // (agent, task)

struct BottleneckResult {
  double value = 0.0;
  std::vector<int> agent_of_task;
};

/// Minimises the largest assigned weight using only edges set in `allowed`.
/// Every task (column) must be assigned; agents take at most one task.
BottleneckResult bottleneck_assignment(const Eigen::MatrixXd& weights,
                                       const EdgeMask& allowed);
BottleneckResult bottleneck_assignment(const Eigen::MatrixXd& weights);

/// Allowed edges whose weight equals the bottleneck value, in row-major order.
std::vector<Edge> bottleneck_edge_set(const Eigen::MatrixXd& weights,
                                      const EdgeMask& allowed);

struct MarginResult {
  Edge edge{-1, -1};
  double margin = 0.0;
};

/// Maximum-margin bottleneck edge of the complete subgraph agents x tasks.
MarginResult robustness_margin(const Eigen::MatrixXd& weights,
                               const std::vector<int>& agents,
                               const std::vector<int>& tasks);

struct OrderRecord {
  int order = 0;  // 1-based
  int agent = -1;
  int task = -1;
  double weight = 0.0;
  double margin = 0.0;
};

struct SequentialAssignment {
  std::vector<OrderRecord> orders;
  std::vector<int> unassigned;

  double min_margin() const;
  /// Index into `orders` for an agent, or -1 when unassigned.
  int order_index_of_agent(int agent) const;
  int agent_of_task(int task) const;
};

SequentialAssignment sequential_bottleneck(const Eigen::MatrixXd& weights);

inline constexpr double kInfiniteMargin = std::numeric_limits<double>::infinity();

}  // namespace decoy

#endif  // DECOY_ASSIGNMENT_HPP
