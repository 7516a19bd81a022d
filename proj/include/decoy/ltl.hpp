#ifndef DECOY_LTL_HPP
#define DECOY_LTL_HPP

#include "decoy/geometry.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace decoy::ltl {

enum class Op { Atom, True, False, And, Or, Next, Until, Release, Eventually, Always };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Bounded LTL in positive normal form: negation only on atoms.
struct Formula {
  Op op = Op::True;
  std::string atom;
  bool negated = false;
  std::vector<FormulaPtr> children;
};

FormulaPtr atom(const std::string& id, bool negated = false);
FormulaPtr truth();
FormulaPtr falsity();
FormulaPtr conj(std::vector<FormulaPtr> parts);
FormulaPtr disj(std::vector<FormulaPtr> parts);
FormulaPtr next(FormulaPtr f);
FormulaPtr until(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr release(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr eventually(FormulaPtr f);
FormulaPtr always(FormulaPtr f);

bool structurally_equal(const Formula& a, const Formula& b);

/// ASCII rendering with F/G/U/R/X and !, &, |.
std::string render(const Formula& f);

/// Time-indexed polyhedral atoms over the stacked state (p, v).
class AtomTable {
 public:
  using Generator = std::function<Polyhedron(int step)>;

  void add(const std::string& id, Generator gen);
  bool has(const std::string& id) const { return atoms_.count(id) > 0; }
  Polyhedron polyhedron(const std::string& id, int step) const;
  bool holds(const std::string& id, int step, const Vec6& x) const;

  /// Row residual slack accepted as membership.
  double tolerance = 0.0;

 private:
  std::map<std::string, Generator> atoms_;
};

/// Satisfaction of `f` by the state sequence starting at step k0. `states`
/// is indexed by absolute step and its last entry is the final step N.
bool evaluate(const Formula& f, const std::vector<Vec6>& states,
              const AtomTable& atoms, int k0);

/// Per-step satisfaction vector for steps k0..N (index 0 is k0).
std::vector<bool> evaluate_all(const Formula& f, const std::vector<Vec6>& states,
                               const AtomTable& atoms, int k0);

std::string cone_atom(int threat);
std::string burn_atom(int threat);
std::string doppler_atom(int threat);

/// cone & !burn & G doppler
FormulaPtr positioning_conjunct(int threat);
/// F(cone & !burn & G doppler)
FormulaPtr positioning_formula(int threat);

/// Earliest step >= k0 at which the positioning conjunct holds.
std::optional<int> first_satisfaction_step(const std::vector<Vec6>& states,
                                           const AtomTable& atoms, int threat,
                                           int k0 = 0);

/// Registers the cone, burn and Doppler atoms of one threat. `engagement`
/// maps an absolute step to the predicted engagement at that step.
void add_positioning_atoms(AtomTable& table, int threat,
                           std::function<Engagement(int)> engagement,
                           const PlanningParams& params);

}  // namespace decoy::ltl

#endif  // DECOY_LTL_HPP
