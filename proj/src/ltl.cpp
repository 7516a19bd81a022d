#include "decoy/ltl.hpp"

#include <sstream>

namespace decoy::ltl {

namespace {

FormulaPtr make(Op op, std::vector<FormulaPtr> children = {}) {
  auto f = std::make_shared<Formula>();
  f->op = op;
  f->children = std::move(children);
  return f;
}

}  // namespace

FormulaPtr atom(const std::string& id, bool negated) {
  auto f = std::make_shared<Formula>();
  f->op = Op::Atom;
  f->atom = id;
  f->negated = negated;
  return f;
}

FormulaPtr truth() { return make(Op::True); }
FormulaPtr falsity() { return make(Op::False); }
FormulaPtr conj(std::vector<FormulaPtr> parts) { return make(Op::And, std::move(parts)); }
FormulaPtr disj(std::vector<FormulaPtr> parts) { return make(Op::Or, std::move(parts)); }
FormulaPtr next(FormulaPtr f) { return make(Op::Next, {std::move(f)}); }
FormulaPtr until(FormulaPtr lhs, FormulaPtr rhs) {
  return make(Op::Until, {std::move(lhs), std::move(rhs)});
}
FormulaPtr release(FormulaPtr lhs, FormulaPtr rhs) {
  return make(Op::Release, {std::move(lhs), std::move(rhs)});
}
FormulaPtr eventually(FormulaPtr f) { return make(Op::Eventually, {std::move(f)}); }
FormulaPtr always(FormulaPtr f) { return make(Op::Always, {std::move(f)}); }

bool structurally_equal(const Formula& a, const Formula& b) {
  if (a.op != b.op || a.atom != b.atom || a.negated != b.negated ||
      a.children.size() != b.children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!structurally_equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

std::string render(const Formula& f) {
  std::ostringstream os;
  switch (f.op) {
    case Op::Atom: os << (f.negated ? "!" : "") << f.atom; break;
    case Op::True: os << "true"; break;
    case Op::False: os << "false"; break;
    case Op::And:
    case Op::Or: {
      os << "(";
      for (std::size_t i = 0; i < f.children.size(); ++i) {
        if (i) os << (f.op == Op::And ? " & " : " | ");
        os << render(*f.children[i]);
      }
      os << ")";
      break;
    }
    case Op::Next: os << "X " << render(*f.children[0]); break;
    case Op::Eventually: os << "F " << render(*f.children[0]); break;
    case Op::Always: os << "G " << render(*f.children[0]); break;
    case Op::Until:
      os << "(" << render(*f.children[0]) << " U " << render(*f.children[1]) << ")";
      break;
    case Op::Release:
      os << "(" << render(*f.children[0]) << " R " << render(*f.children[1]) << ")";
      break;
  }
  return os.str();
}

void AtomTable::add(const std::string& id, Generator gen) {
  atoms_[id] = std::move(gen);
}

Polyhedron AtomTable::polyhedron(const std::string& id, int step) const {
  auto it = atoms_.find(id);
  if (it == atoms_.end()) {
    throw Error(ErrorCode::UnresolvedAtom, "unknown atomic proposition " + id);
  }
  return it->second(step);
}

bool AtomTable::holds(const std::string& id, int step, const Vec6& x) const {
  return polyhedron(id, step).contains(x, tolerance);
}

std::vector<bool> evaluate_all(const Formula& f, const std::vector<Vec6>& states,
                               const AtomTable& atoms, int k0) {
  const int last = static_cast<int>(states.size()) - 1;
  const int len = last - k0 + 1;
  if (len <= 0) {
    throw Error(ErrorCode::InvalidModel, "state sequence does not reach k0");
  }
  std::vector<bool> out(len, false);
  switch (f.op) {
    case Op::Atom:
      for (int i = 0; i < len; ++i) {
        out[i] = atoms.holds(f.atom, k0 + i, states[k0 + i]) != f.negated;
      }
      break;
    case Op::True: out.assign(len, true); break;
    case Op::False: break;
    case Op::And:
    case Op::Or: {
      out.assign(len, f.op == Op::And);
      for (const FormulaPtr& c : f.children) {
        const auto sub = evaluate_all(*c, states, atoms, k0);
        for (int i = 0; i < len; ++i) {
          out[i] = f.op == Op::And ? (out[i] && sub[i]) : (out[i] || sub[i]);
        }
      }
      break;
    }
    case Op::Next: {
      // X at the final step refers past the sequence and is unsatisfied.
      const auto sub = evaluate_all(*f.children[0], states, atoms, k0);
      for (int i = 0; i + 1 < len; ++i) out[i] = sub[i + 1];
      break;
    }
    case Op::Until:
    case Op::Eventually: {
      std::vector<bool> lhs(len, true);
      if (f.op == Op::Until) lhs = evaluate_all(*f.children[0], states, atoms, k0);
      const auto rhs = evaluate_all(*f.children.back(), states, atoms, k0);
      bool later = false;
      for (int i = len - 1; i >= 0; --i) {
        out[i] = rhs[i] || (lhs[i] && later);
        later = out[i];
      }
      break;
    }
    case Op::Release:
    case Op::Always: {
      std::vector<bool> lhs(len, false);
      if (f.op == Op::Release) lhs = evaluate_all(*f.children[0], states, atoms, k0);
      const auto rhs = evaluate_all(*f.children.back(), states, atoms, k0);
      bool later = true;
      for (int i = len - 1; i >= 0; --i) {
        out[i] = rhs[i] && (lhs[i] || later);
        later = out[i];
      }
      break;
    }
  }
  return out;
}

bool evaluate(const Formula& f, const std::vector<Vec6>& states,
              const AtomTable& atoms, int k0) {
  return evaluate_all(f, states, atoms, k0).front();
}

std::string cone_atom(int threat) { return "cone_" + std::to_string(threat); }
std::string burn_atom(int threat) { return "burn_" + std::to_string(threat); }
std::string doppler_atom(int threat) { return "doppler_" + std::to_string(threat); }

FormulaPtr positioning_conjunct(int threat) {
  return conj({atom(cone_atom(threat)), atom(burn_atom(threat), true),
               always(atom(doppler_atom(threat)))});
}

FormulaPtr positioning_formula(int threat) {
  return eventually(positioning_conjunct(threat));
}

std::optional<int> first_satisfaction_step(const std::vector<Vec6>& states,
                                           const AtomTable& atoms, int threat,
                                           int k0) {
  const auto sat = evaluate_all(*positioning_conjunct(threat), states, atoms, k0);
  for (std::size_t i = 0; i < sat.size(); ++i) {
    if (sat[i]) return k0 + static_cast<int>(i);
  }
  return std::nullopt;
}

void add_positioning_atoms(AtomTable& table, int threat,
                           std::function<Engagement(int)> engagement,
                           const PlanningParams& params) {
  const double theta = params.cone_half_angle;
  table.add(cone_atom(threat), [engagement, theta](int k) {
    return approx_tracking_cone(engagement(k), theta);
  });
  table.add(burn_atom(threat), [engagement, theta](int k) {
    return burn_through_halfspace(engagement(k), theta);
  });
  table.add(doppler_atom(threat), [engagement, params](int k) {
    return doppler_set(engagement(k), params);
  });
}

}  // namespace decoy::ltl
