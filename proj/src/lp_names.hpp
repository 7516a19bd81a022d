// Identifiers used for a model in LP files and solution files.
#ifndef DECOY_SRC_LP_NAMES_HPP
#define DECOY_SRC_LP_NAMES_HPP

#include "decoy/milp.hpp"

#include <string>
#include <vector>

namespace decoy::milp::detail {

struct LpNames {
  std::vector<std::string> variables;
  std::vector<std::string> rows;
};

LpNames lp_names(const MilpModel& model);

}  // namespace decoy::milp::detail

#endif  // DECOY_SRC_LP_NAMES_HPP
