#include "simplex.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace decoy::milp::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr int kDegenerateLimit = 50;
constexpr int kRecomputeEvery = 100;

}  // namespace

std::shared_ptr<const LpData> LpData::from_model(const MilpModel& model) {
  auto lp = std::make_shared<LpData>();
  lp->n = static_cast<int>(model.variables.size());
  lp->col_lo.resize(lp->n);
  lp->col_hi.resize(lp->n);
  for (int j = 0; j < lp->n; ++j) {
    lp->col_lo(j) = model.variables[j].lower;
    lp->col_hi(j) = model.variables[j].upper;
  }

  std::vector<int> kept;
  std::vector<std::map<int, double>> merged;
  for (std::size_t r = 0; r < model.rows.size(); ++r) {
    std::map<int, double> coefs;
    for (const Term& t : model.rows[r].terms) coefs[t.var] += t.coef;
    for (auto it = coefs.begin(); it != coefs.end();) {
      it = it->second == 0.0 ? coefs.erase(it) : std::next(it);
    }
    if (coefs.empty()) {
      const Row& row = model.rows[r];
      const bool ok = row.sense == Sense::Equal
                          ? std::abs(row.rhs) <= kFeasibilityTol
                          : row.rhs >= -kFeasibilityTol;
      if (!ok) lp->trivially_infeasible = true;
      continue;
    }
    kept.push_back(static_cast<int>(r));
    merged.push_back(std::move(coefs));
  }

  lp->m = static_cast<int>(kept.size());
  lp->A = Eigen::MatrixXd::Zero(lp->m, lp->n);
  lp->row_lo.resize(lp->m);
  lp->row_hi.resize(lp->m);
  for (int i = 0; i < lp->m; ++i) {
    const Row& row = model.rows[kept[i]];
    double scale = 0.0;
    for (const auto& [var, coef] : merged[i]) scale = std::max(scale, std::abs(coef));
    for (const auto& [var, coef] : merged[i]) lp->A(i, var) = coef / scale;
    lp->row_hi(i) = row.rhs / scale;
    lp->row_lo(i) = row.sense == Sense::Equal ? row.rhs / scale : -kInf;
  }

  lp->c_orig = Eigen::VectorXd::Zero(lp->n);
  for (const Term& t : model.objective) lp->c_orig(t.var) += t.coef;
  const double cmax = lp->c_orig.size() ? lp->c_orig.cwiseAbs().maxCoeff() : 0.0;
  lp->obj_scale = cmax > 0.0 ? cmax : 1.0;
  lp->c = lp->c_orig / lp->obj_scale;
  return lp;
}

DenseSimplex::DenseSimplex(std::shared_ptr<const LpData> lp)
    : lp_(std::move(lp)), n_(lp_->n), m_(lp_->m), T_(lp_->A) {
  lo_.resize(n_ + m_);
  hi_.resize(n_ + m_);
  x_ = Eigen::VectorXd::Zero(n_ + m_);
  lo_ << lp_->col_lo, lp_->row_lo;
  hi_ << lp_->col_hi, lp_->row_hi;
  state_.assign(n_ + m_, State::Basic);
  nonbasic_.resize(n_);
  basis_.resize(m_);
  for (int j = 0; j < n_; ++j) {
    nonbasic_[j] = j;
    if (std::isfinite(lo_(j))) {
      state_[j] = State::AtLower;
      x_(j) = lo_(j);
    } else if (std::isfinite(hi_(j))) {
      state_[j] = State::AtUpper;
      x_(j) = hi_(j);
    } else {
      state_[j] = State::FreeZero;
      x_(j) = 0.0;
    }
  }
  for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
}

void DenseSimplex::set_bounds(int var, double lo, double hi) {
  lo_(var) = lo;
  hi_(var) = hi;
  if (state_[var] == State::Basic) return;
  if (std::isfinite(lo) && (state_[var] == State::AtLower || !std::isfinite(hi))) {
    state_[var] = State::AtLower;
    x_(var) = lo;
  } else if (std::isfinite(hi)) {
    state_[var] = State::AtUpper;
    x_(var) = hi;
  } else {
    state_[var] = State::FreeZero;
    x_(var) = 0.0;
  }
  dirty_ = true;
}

void DenseSimplex::recompute_basics() {
  Eigen::VectorXd xn(n_);
  for (int j = 0; j < n_; ++j) xn(j) = x_(nonbasic_[j]);
  const Eigen::VectorXd xb = T_ * xn;
  for (int i = 0; i < m_; ++i) x_(basis_[i]) = xb(i);
  dirty_ = false;
}

bool DenseSimplex::refactor() {
  // Columns of [A, -I] split into basic and nonbasic parts.
  auto column = [this](int var) -> Eigen::VectorXd {
    if (var < n_) return lp_->A.col(var);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
    e(var - n_) = -1.0;
    return e;
  };
  Eigen::MatrixXd MB(m_, m_);
  Eigen::MatrixXd MN(m_, n_);
  for (int i = 0; i < m_; ++i) MB.col(i) = column(basis_[i]);
  for (int j = 0; j < n_; ++j) MN.col(j) = column(nonbasic_[j]);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(MB);
  const double det_scale = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(det_scale > 1e-13)) return false;
  T_ = -lu.solve(MN);
  recompute_basics();
  return true;
}

double DenseSimplex::residual() const {
  if (m_ == 0) return 0.0;
  const Eigen::VectorXd act = lp_->A * x_.head(n_);
  return (act - x_.tail(m_)).cwiseAbs().maxCoeff();
}

void DenseSimplex::pivot(int r, int j) {
  const double p = T_(r, j);
  const Eigen::VectorXd col = T_.col(j);
  const Eigen::RowVectorXd row = T_.row(r);
  T_.noalias() -= col * (row / p);
  T_.col(j) = col / p;
  T_.row(r) = -row / p;
  T_(r, j) = 1.0 / p;
  std::swap(basis_[r], nonbasic_[j]);
  state_[basis_[r]] = State::Basic;
}

LpStatus DenseSimplex::solve(long max_iterations, Clock::time_point deadline) {
  if (lp_->trivially_infeasible) return LpStatus::Infeasible;
  if (dirty_) recompute_basics();
  int degenerate = 0;
  int refactors = 0;
  long since_recompute = 0;
  const long start = iterations_;
  Eigen::VectorXd d(n_);
  Eigen::VectorXd alpha(m_);

  while (true) {
    if (iterations_ - start >= max_iterations) return LpStatus::IterationLimit;
    if ((iterations_ & 63) == 0 && Clock::now() > deadline) return LpStatus::TimeLimit;
    if (since_recompute >= kRecomputeEvery) {
      recompute_basics();
      since_recompute = 0;
    }

    // Phase 1 minimises the sum of infeasibilities; phase 2 the objective.
    bool phase1 = false;
    for (int i = 0; i < m_ && !phase1; ++i) {
      const int b = basis_[i];
      phase1 = x_(b) < lo_(b) - kPrimalTol || x_(b) > hi_(b) + kPrimalTol;
    }
    for (int j = 0; j < n_; ++j) {
      const int v = nonbasic_[j];
      d(j) = !phase1 && v < n_ ? lp_->c(v) : 0.0;
    }
    for (int i = 0; i < m_; ++i) {
      const int b = basis_[i];
      double cb = 0.0;
      if (phase1) {
        if (x_(b) < lo_(b) - kPrimalTol) cb = -1.0;
        else if (x_(b) > hi_(b) + kPrimalTol) cb = 1.0;
      } else if (b < n_) {
        cb = lp_->c(b);
      }
      if (cb != 0.0) d.noalias() += cb * T_.row(i).transpose();
    }

    const bool bland = degenerate >= kDegenerateLimit;
    int enter = -1;
    double best = 0.0;
    for (int j = 0; j < n_; ++j) {
      const int v = nonbasic_[j];
      const bool can_up = x_(v) < hi_(v) - kPrimalTol;
      const bool can_down = x_(v) > lo_(v) + kPrimalTol;
      if (!((d(j) < -kDualTol && can_up) || (d(j) > kDualTol && can_down))) continue;
      if (bland) {
        if (enter < 0 || v < nonbasic_[enter]) enter = j;
      } else if (std::abs(d(j)) > best) {
        best = std::abs(d(j));
        enter = j;
      }
    }

    if (enter < 0) {
      const bool stale = since_recompute > 0 || iterations_ > start;
      if (stale && refactors < 3 && residual() > 1e-7) {
        ++refactors;
        if (!refactor()) return LpStatus::Infeasible;
        since_recompute = 0;
        continue;
      }
      return phase1 ? LpStatus::Infeasible : LpStatus::Optimal;
    }

    const int ve = nonbasic_[enter];
    const double dir = d(enter) < 0.0 ? 1.0 : -1.0;
    alpha.noalias() = dir * T_.col(enter);

    // Harris two-pass ratio test.
    auto target_of = [&](int i, double a, double* target) {
      const int b = basis_[i];
      const double v = x_(b);
      // An infeasible basic moving further away is not blocked.
      if (a > 0.0 && v > hi_(b) + kPrimalTol) return false;
      if (a < 0.0 && v < lo_(b) - kPrimalTol) return false;
      if (a > 0.0) {
        if (phase1 && v < lo_(b) - kPrimalTol) *target = lo_(b);
        else if (std::isfinite(hi_(b))) *target = hi_(b);
        else return false;
      } else {
        if (phase1 && v > hi_(b) + kPrimalTol) *target = hi_(b);
        else if (std::isfinite(lo_(b))) *target = lo_(b);
        else return false;
      }
      return true;
    };

    int leave = -1;
    double theta = kInf;
    double leave_target = 0.0;
    if (bland) {
      for (int i = 0; i < m_; ++i) {
        const double a = alpha(i);
        if (std::abs(a) < kPivotTol) continue;
        double target;
        if (!target_of(i, a, &target)) continue;
        const double ratio = std::max(0.0, (target - x_(basis_[i])) / a);
        if (ratio < theta ||
            (ratio == theta && leave >= 0 && basis_[i] < basis_[leave])) {
          theta = ratio;
          leave = i;
          leave_target = target;
        }
      }
    } else {
      double relaxed = kInf;
      for (int i = 0; i < m_; ++i) {
        const double a = alpha(i);
        if (std::abs(a) < kPivotTol) continue;
        double target;
        if (!target_of(i, a, &target)) continue;
        const double slack = a > 0.0 ? kPrimalTol : -kPrimalTol;
        relaxed = std::min(relaxed, (target + slack - x_(basis_[i])) / a);
      }
      double best_pivot = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double a = alpha(i);
        if (std::abs(a) < kPivotTol) continue;
        double target;
        if (!target_of(i, a, &target)) continue;
        const double ratio = (target - x_(basis_[i])) / a;
        if (ratio <= relaxed && std::abs(a) > best_pivot) {
          best_pivot = std::abs(a);
          leave = i;
          theta = std::max(0.0, ratio);
          leave_target = target;
        }
      }
    }

    const double range = hi_(ve) - lo_(ve);
    ++iterations_;
    ++since_recompute;
    if (std::isfinite(range) && range <= theta) {
      // Bound flip of the entering variable.
      x_(ve) = dir > 0.0 ? hi_(ve) : lo_(ve);
      state_[ve] = dir > 0.0 ? State::AtUpper : State::AtLower;
      for (int i = 0; i < m_; ++i) x_(basis_[i]) += range * alpha(i);
      degenerate = 0;
      continue;
    }
    if (leave < 0) {
      return LpStatus::Unbounded;
    }

    x_(ve) += dir * theta;
    for (int i = 0; i < m_; ++i) x_(basis_[i]) += theta * alpha(i);
    const int vl = basis_[leave];
    x_(vl) = leave_target;
    pivot(leave, enter);
    state_[vl] = leave_target == lo_(vl) ? State::AtLower : State::AtUpper;
    degenerate = theta <= 1e-12 ? degenerate + 1 : 0;
  }
}

Eigen::VectorXd DenseSimplex::primal() const {
  Eigen::VectorXd x = x_.head(n_);
  for (int j = 0; j < n_; ++j) x(j) = std::clamp(x(j), lo_(j), hi_(j));
  return x;
}

double DenseSimplex::objective() const {
  return lp_->c_orig.dot(primal());
}

}  // namespace decoy::milp::detail
