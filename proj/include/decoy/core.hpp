#ifndef DECOY_CORE_HPP
#define DECOY_CORE_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace decoy {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;

using Vec3 = Vector3<double>;
using Vec6 = Vector6<double>;

enum class ErrorCode {
  DegenerateDirection,
  InputBound,
  DisturbanceBound,
  InvalidScenario,
  ConfigParse,
  NoViableTarget,
  InfeasibleAssignment,
  EmptyEdgeSet,
  InfeasibleSafeSet,
  UnresolvedAtom,
  UnsoundBigM,
  InvalidModel,
  SolverSpawn,
  SolverParse,
  SolverInfeasible,
  NoIntersection,
  EmptyFeasibleSet,
  Usage,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

template <typename Derived>
typename Derived::Scalar inf_norm(const Eigen::MatrixBase<Derived>& v) {
  return v.template lpNorm<Eigen::Infinity>();
}

}  // namespace decoy

#endif  // DECOY_CORE_HPP
