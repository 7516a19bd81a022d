#!/usr/bin/env python3
"""External MILP hook backed by HiGHS.

Usage: highs_solve.py MODEL.lp SOLUTION.txt

Writes "status <s>", "objective <v>" and one "name value" line per column.
The time limit is read from DECOY_SOLVER_TIME_LIMIT (seconds).
"""
import os
import sys

import highspy


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    lp_path, sol_path = sys.argv[1], sys.argv[2]
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", 1)
    limit = os.environ.get("DECOY_SOLVER_TIME_LIMIT")
    if limit:
        h.setOptionValue("time_limit", float(limit))
    h.setOptionValue("mip_rel_gap", 0.0)
    h.readModel(lp_path)
    h.run()
    status = h.getModelStatus()
    S = highspy.HighsModelStatus
    if status == S.kOptimal:
        label = "optimal"
    elif status in (S.kInfeasible,):
        label = "infeasible"
    elif status in (S.kUnbounded, S.kUnboundedOrInfeasible):
        label = "unbounded"
    else:
        label = "limit-hit"
    lines = [f"status {label}"]
    info = h.getInfo()
    has_primal = info.primal_solution_status == 2  # feasible
    if has_primal:
        lines.append(f"objective {info.objective_function_value:.17g}")
        values = h.getSolution().col_value
        for i, value in enumerate(values):
            lines.append(f"{h.getColName(i)[1]} {value:.17g}")
    with open(sol_path, "w") as out:
        out.write("\n".join(lines) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
