// Dense bounded-variable primal simplex on a dictionary x_B = T x_N.
#ifndef DECOY_SRC_SIMPLEX_HPP
#define DECOY_SRC_SIMPLEX_HPP

#include "decoy/milp.hpp"

#include <chrono>
#include <cstdint>
#include <memory>
#include <vector>

namespace decoy::milp::detail {

/// Row-scaled LP: row_lo <= A x <= row_hi, col_lo <= x <= col_hi, min c'x.
struct LpData {
  int n = 0;
  int m = 0;
  Eigen::MatrixXd A;
  Eigen::VectorXd row_lo, row_hi;
  Eigen::VectorXd col_lo, col_hi;
  Eigen::VectorXd c;      // scaled by 1 / obj_scale
  double obj_scale = 1.0;
  Eigen::VectorXd c_orig;
  bool trivially_infeasible = false;  // an empty row cannot hold

  static std::shared_ptr<const LpData> from_model(const MilpModel& model);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, TimeLimit };

class DenseSimplex {
 public:
  using Clock = std::chrono::steady_clock;

  explicit DenseSimplex(std::shared_ptr<const LpData> lp);

  /// Changes bounds of a structural variable; the current basis is kept.
  void set_bounds(int var, double lo, double hi);
  double lower(int var) const { return lo_(var); }
  double upper(int var) const { return hi_(var); }

  LpStatus solve(long max_iterations, Clock::time_point deadline);

  /// Structural values clipped to their bounds.
  Eigen::VectorXd primal() const;
  double objective() const;
  long iterations() const { return iterations_; }
  std::size_t memory_bytes() const {
    return static_cast<std::size_t>(T_.size()) * sizeof(double);
  }

 private:
  enum class State : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

  void recompute_basics();
  bool refactor();
  /// Largest mismatch between row activities and their slack values.
  double residual() const;
  void pivot(int r, int j);

  std::shared_ptr<const LpData> lp_;
  int n_ = 0;
  int m_ = 0;
  Eigen::MatrixXd T_;
  std::vector<int> basis_;
  std::vector<int> nonbasic_;
  std::vector<State> state_;
  Eigen::VectorXd lo_, hi_, x_;
  bool dirty_ = true;
  long iterations_ = 0;
};

}  // namespace decoy::milp::detail

#endif  // DECOY_SRC_SIMPLEX_HPP
