#include "decoy/milp.hpp"

#include "lp_names.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace decoy::milp {

namespace detail {

namespace {

std::string sanitize(const std::string& raw, const char* fallback, std::size_t index) {
  std::string s;
  for (char c : raw) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    s += ok ? c : '_';
  }
  if (s.empty()) s = fallback + std::to_string(index);
  // Leading digits, dots or 'e' are ambiguous with numbers in LP files.
  if (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '.' || s[0] == 'e' ||
      s[0] == 'E') {
    s = "_" + s;
  }
  return s;
}

std::vector<std::string> unique_names(std::vector<std::string> names) {
  std::unordered_map<std::string, int> seen;
  for (const auto& n : names) ++seen[n];
  std::unordered_map<std::string, int> used;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (seen[names[i]] > 1) names[i] += "_" + std::to_string(used[names[i]]++);
  }
  return names;
}

}  // namespace

LpNames lp_names(const MilpModel& model) {
  LpNames out;
  for (std::size_t j = 0; j < model.variables.size(); ++j) {
    out.variables.push_back(sanitize(model.variables[j].name, "x", j));
  }
  for (std::size_t i = 0; i < model.rows.size(); ++i) {
    out.rows.push_back(sanitize(model.rows[i].name, "r", i));
  }
  out.variables = unique_names(std::move(out.variables));
  out.rows = unique_names(std::move(out.rows));
  return out;
}

}  // namespace detail

namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_terms(std::ostringstream& os, const std::vector<Term>& terms,
                 const std::vector<std::string>& names) {
  std::unordered_map<int, double> merged;
  std::vector<int> order;
  for (const Term& t : terms) {
    if (!merged.count(t.var)) order.push_back(t.var);
    merged[t.var] += t.coef;
  }
  bool first = true;
  for (int var : order) {
    const double c = merged[var];
    if (c == 0.0) continue;
    os << (c < 0 ? (first ? "-" : " -") : (first ? "" : " +")) << (first ? "" : " ")
       << number(std::abs(c)) << ' ' << names[var];
    first = false;
  }
  if (first) os << "0 " << names.front();
}

}  // namespace

std::string write_lp(const MilpModel& model) {
  model.validate();
  if (model.variables.empty()) {
    throw Error(ErrorCode::InvalidModel, "cannot export a model without variables");
  }
  const detail::LpNames names = detail::lp_names(model);
  std::ostringstream os;
  os << "\\ objective constant " << number(model.objective_constant) << "\n";
  os << "Minimize\n obj: ";
  write_terms(os, model.objective, names.variables);
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < model.rows.size(); ++i) {
    const Row& r = model.rows[i];
    os << ' ' << names.rows[i] << ": ";
    write_terms(os, r.terms, names.variables);
    os << (r.sense == Sense::Equal ? " = " : " <= ") << number(r.rhs) << "\n";
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < model.variables.size(); ++j) {
    const Variable& v = model.variables[j];
    const std::string& nm = names.variables[j];
    const bool lo_fin = std::isfinite(v.lower);
    const bool hi_fin = std::isfinite(v.upper);
    if (!lo_fin && !hi_fin) {
      os << ' ' << nm << " free\n";
    } else if (lo_fin && hi_fin) {
      os << ' ' << number(v.lower) << " <= " << nm << " <= " << number(v.upper) << "\n";
    } else if (lo_fin) {
      os << ' ' << nm << " >= " << number(v.lower) << "\n";
    } else {
      os << " -inf <= " << nm << " <= " << number(v.upper) << "\n";
    }
  }
  bool any_binary = false;
  for (std::size_t j = 0; j < model.variables.size(); ++j) {
    if (model.variables[j].kind != VarKind::Binary) continue;
    if (!any_binary) os << "Binaries\n";
    any_binary = true;
    os << ' ' << names.variables[j] << "\n";
  }
  os << "End\n";
  return os.str();
}

Solution parse_solution(const MilpModel& model, const std::string& text) {
  auto fail = [&text](const std::string& why) -> Error {
    return Error(ErrorCode::SolverParse, why + "; raw output:\n" + text);
  };
  const detail::LpNames names = detail::lp_names(model);
  std::unordered_map<std::string, int> index;
  for (std::size_t j = 0; j < names.variables.size(); ++j) {
    index[names.variables[j]] = static_cast<int>(j);
  }

  Solution sol;
  bool have_status = false;
  std::vector<bool> seen(model.variables.size(), false);
  Eigen::VectorXd values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.variables.size()));
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key, value, extra;
    if (!(ls >> key)) continue;
    if (!(ls >> value) || (ls >> extra)) throw fail("malformed line '" + line + "'");
    if (key == "status") {
      if (value == "optimal") sol.status = Status::Optimal;
      else if (value == "infeasible") sol.status = Status::Infeasible;
      else if (value == "unbounded") sol.status = Status::Unbounded;
      else if (value == "limit-hit") sol.status = Status::LimitHit;
      else throw fail("unknown status '" + value + "'");
      have_status = true;
      continue;
    }
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw fail("bad number '" + value + "'");
    }
    if (key == "objective") continue;  // recomputed from the values
    auto it = index.find(key);
    if (it == index.end()) throw fail("unknown variable '" + key + "'");
    values(it->second) = v;
    seen[it->second] = true;
  }
  if (!have_status) throw fail("missing status line");
  if (sol.status == Status::Optimal || sol.status == Status::LimitHit) {
    bool any = false;
    for (std::size_t j = 0; j < seen.size(); ++j) {
      if (!seen[j] && sol.status == Status::Optimal) {
        throw fail("no value for variable '" + names.variables[j] + "'");
      }
      any = any || seen[j];
    }
    if (any) {
      for (std::size_t j = 0; j < model.variables.size(); ++j) {
        if (model.variables[j].kind == VarKind::Binary) values(j) = std::round(values(j));
      }
      sol.values = values;
      sol.objective = model.objective_value(values);
      sol.bound = sol.status == Status::Optimal ? sol.objective : -std::numeric_limits<double>::infinity();
    }
  }
  return sol;
}

}  // namespace decoy::milp
