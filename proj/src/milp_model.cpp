#include "decoy/milp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace decoy::milp {

int MilpModel::add_variable(std::string name, VarKind kind, double lower,
                            double upper, int branch_priority) {
  variables.push_back({std::move(name), kind, lower, upper, branch_priority});
  return static_cast<int>(variables.size()) - 1;
}

int MilpModel::add_row(std::string name, std::vector<Term> terms, Sense sense,
                       double rhs, RowFamily family, int step) {
  rows.push_back({std::move(name), std::move(terms), sense, rhs, family, step});
  return static_cast<int>(rows.size()) - 1;
}

int MilpModel::count(VarKind kind) const {
  return static_cast<int>(std::count_if(
      variables.begin(), variables.end(),
      [kind](const Variable& v) { return v.kind == kind; }));
}

int MilpModel::count(RowFamily family) const {
  return static_cast<int>(
      std::count_if(rows.begin(), rows.end(),
                    [family](const Row& r) { return r.family == family; }));
}

int MilpModel::find_variable(const std::string& name) const {
  for (std::size_t j = 0; j < variables.size(); ++j) {
    if (variables[j].name == name) return static_cast<int>(j);
  }
  return -1;
}

void MilpModel::validate() const {
  const int n = static_cast<int>(variables.size());
  for (const Variable& v : variables) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
      throw Error(ErrorCode::InvalidModel, "bad bounds on variable " + v.name);
    }
    if (v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0)) {
      throw Error(ErrorCode::InvalidModel,
                  "binary variable " + v.name + " not within [0, 1]");
    }
  }
  auto check_terms = [n](const std::vector<Term>& terms, const std::string& where) {
    for (const Term& t : terms) {
      if (t.var < 0 || t.var >= n || !std::isfinite(t.coef)) {
        throw Error(ErrorCode::InvalidModel, "unresolved term in " + where);
      }
    }
  };
  for (const Row& r : rows) {
    check_terms(r.terms, r.name);
    if (!std::isfinite(r.rhs)) {
      throw Error(ErrorCode::InvalidModel, "non-finite rhs in " + r.name);
    }
  }
  check_terms(objective, "objective");
}

double MilpModel::objective_value(const Eigen::VectorXd& x) const {
  double v = objective_constant;
  for (const Term& t : objective) v += t.coef * x(t.var);
  return v;
}

double MilpModel::row_activity(const Row& row, const Eigen::VectorXd& x) const {
  double a = 0.0;
  for (const Term& t : row.terms) a += t.coef * x(t.var);
  return a;
}

double MilpModel::max_row_violation(const Eigen::VectorXd& x) const {
  double worst = 0.0;
  for (const Row& r : rows) {
    const double a = row_activity(r, x);
    double viol = a - r.rhs;
    if (r.sense == Sense::Equal) viol = std::abs(viol);
    // Compare in row-normalised units.
    double scale = 0.0;
    for (const Term& t : r.terms) scale = std::max(scale, std::abs(t.coef));
    if (scale > 0.0) viol /= scale;
    worst = std::max(worst, viol);
  }
  return worst;
}

const char* to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::LimitHit: return "limit-hit";
  }
  return "unknown";
}

}  // namespace decoy::milp
