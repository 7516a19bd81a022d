#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace decoy;
using namespace decoy::milp;
using testsupport::uniform;

namespace {

// Random feasible LP around a known interior point, with lower bounds in
// [-5, 0] so that the oracle needs a shift.
struct RandomLp {
  MilpModel model;
  Eigen::VectorXd lower, upper, c;
  Eigen::MatrixXd a_le, a_eq;
  Eigen::VectorXd b_le, b_eq;
};

RandomLp random_lp(std::mt19937_64& rng, int m_le, int m_eq, int n) {
  RandomLp r;
  r.lower.resize(n);
  r.upper.resize(n);
  r.c.resize(n);
  Eigen::VectorXd x0(n);
  for (int j = 0; j < n; ++j) {
    r.lower(j) = std::floor(uniform(rng, -5, 1));
    r.upper(j) = r.lower(j) + uniform(rng, 1, 10);
    x0(j) = uniform(rng, r.lower(j), r.upper(j));
    r.c(j) = uniform(rng, -10, 10);
    r.model.add_variable("x" + std::to_string(j), VarKind::Continuous, r.lower(j), r.upper(j));
  }
  r.a_le = Eigen::MatrixXd::Zero(m_le, n);
  r.a_eq = Eigen::MatrixXd::Zero(m_eq, n);
  r.b_le.resize(m_le);
  r.b_eq.resize(m_eq);
  auto fill = [&](Eigen::MatrixXd& a, int i) {
    for (int j = 0; j < n; ++j) {
      if (uniform(rng, 0, 1) < 0.4) a(i, j) = std::round(uniform(rng, -9, 9));
    }
  };
  auto terms = [&](const Eigen::MatrixXd& a, int i) {
    std::vector<Term> t;
    for (int j = 0; j < n; ++j) {
      if (a(i, j) != 0.0) t.push_back({j, a(i, j)});
    }
    return t;
  };
  for (int i = 0; i < m_le; ++i) {
    fill(r.a_le, i);
    r.b_le(i) = r.a_le.row(i).dot(x0) + uniform(rng, 0, 5);
    r.model.add_row("le" + std::to_string(i), terms(r.a_le, i), Sense::LessEqual, r.b_le(i),
                    RowFamily::Plumbing);
  }
  for (int i = 0; i < m_eq; ++i) {
    fill(r.a_eq, i);
    r.b_eq(i) = r.a_eq.row(i).dot(x0);
    r.model.add_row("eq" + std::to_string(i), terms(r.a_eq, i), Sense::Equal, r.b_eq(i),
                    RowFamily::Plumbing);
  }
  for (int j = 0; j < n; ++j) r.model.objective.push_back({j, r.c(j)});
  return r;
}

// Oracle solve in the shifted variables y = x - lower >= 0.
oracle::LpResult oracle_solve(const RandomLp& r) {
  const Eigen::VectorXd b_le = r.b_le - r.a_le * r.lower;
  const Eigen::VectorXd b_eq = r.b_eq - r.a_eq * r.lower;
  oracle::LpResult res = oracle::textbook_lp(r.c, r.a_le, b_le, r.a_eq, b_eq, r.upper - r.lower);
  if (res.feasible && res.bounded) {
    res.x += r.lower;
    res.objective = r.c.dot(res.x);
  }
  return res;
}

struct Knapsack {
  MilpModel model;
  std::vector<double> value, weight;
  double capacity = 0;
};

Knapsack random_knapsack(std::mt19937_64& rng, int items) {
  Knapsack k;
  std::vector<Term> w;
  double total = 0;
  for (int i = 0; i < items; ++i) {
    k.value.push_back(std::round(uniform(rng, 1, 40)));
    k.weight.push_back(std::round(uniform(rng, 1, 30)));
    total += k.weight.back();
    const int v = k.model.add_variable("item" + std::to_string(i), VarKind::Binary, 0, 1);
    k.model.objective.push_back({v, -k.value.back()});
    w.push_back({v, k.weight.back()});
  }
  k.capacity = std::round(total * uniform(rng, 0.25, 0.6));
  k.model.add_row("cap", w, Sense::LessEqual, k.capacity, RowFamily::Plumbing);
  return k;
}

double knapsack_brute_force(const Knapsack& k) {
  const int n = static_cast<int>(k.value.size());
  double best = 0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    double v = 0, w = 0;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1) v += k.value[i], w += k.weight[i];
    }
    if (w <= k.capacity) best = std::max(best, v);
  }
  return -best;
}

std::string scratch_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  std::filesystem::permissions(path, std::filesystem::perms::owner_all);
  return path.string();
}

bool highspy_available() {
  return std::system("python3 -c 'import highspy' >/dev/null 2>&1") == 0;
}

const std::string kHighsScript = std::string(DECOY_SOURCE_DIR) + "/tools/highs_solve.py";

}  // namespace

TEST_CASE("LP relaxation matches a textbook simplex") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 40; ++trial) {
    const RandomLp r = random_lp(rng, 20, trial % 3, 40);
    const oracle::LpResult expect = oracle_solve(r);
    REQUIRE(expect.feasible);
    const Solution got = lp_relax(r.model);
    REQUIRE(got.status == Status::Optimal);
    CHECK(got.objective == doctest::Approx(expect.objective).epsilon(1e-7));
    CHECK(r.model.max_row_violation(got.values) < 1e-7);
    for (int j = 0; j < 40; ++j) {
      CHECK(got.values(j) >= r.lower(j) - 1e-9);
      CHECK(got.values(j) <= r.upper(j) + 1e-9);
    }
  }
}

TEST_CASE("infeasible and unbounded LPs") {
  MilpModel m;
  const int x = m.add_variable("x", VarKind::Continuous, 0, 10);
  const int y = m.add_variable("y", VarKind::Continuous, 0, INFINITY);
  m.objective = {{y, -1.0}};
  m.add_row("r", {{x, 1.0}, {y, -1.0}}, Sense::LessEqual, 5, RowFamily::Plumbing);
  CHECK(lp_relax(m).status == Status::Unbounded);
  m.add_row("bad", {{x, 1.0}}, Sense::LessEqual, -1, RowFamily::Plumbing);
  CHECK(lp_relax(m).status == Status::Infeasible);
  CHECK(solve(m).status == Status::Infeasible);
}

TEST_CASE("branch and bound solves knapsacks exactly") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 25; ++trial) {
    const Knapsack k = random_knapsack(rng, 10);
    const Solution s = solve(k.model);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(knapsack_brute_force(k)));
    for (int j = 0; j < 10; ++j) CHECK((s.values(j) == 0.0 || s.values(j) == 1.0));
    CHECK(k.model.max_row_violation(s.values) <= kFeasibilityTol);
  }
}

TEST_CASE("mixed binary problems match enumeration over the binaries") {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 15; ++trial) {
    // Continuous block from a random LP, switched by binaries through big-M rows.
    RandomLp r = random_lp(rng, 8, 0, 10);
    const int nb = 5;
    std::vector<int> bins;
    Eigen::VectorXd bin_cost(nb);
    for (int b = 0; b < nb; ++b) {
      bins.push_back(r.model.add_variable("b" + std::to_string(b), VarKind::Binary, 0, 1));
      bin_cost(b) = uniform(rng, -20, 20);
      r.model.objective.push_back({bins.back(), bin_cost(b)});
      // x_j <= lower_j + 1 unless b is on.
      const int j = 2 * b;
      const double m = r.upper(j) - r.lower(j);
      r.model.add_row("link" + std::to_string(b), {{j, 1.0}, {bins.back(), -m}}, Sense::LessEqual,
                      r.lower(j) + 1.0, RowFamily::Plumbing);
    }
    const Solution s = solve(r.model);
    double best = INFINITY;
    for (int mask = 0; mask < (1 << nb); ++mask) {
      RandomLp sub = r;
      Eigen::VectorXd ub = r.upper;
      double fixed = 0;
      for (int b = 0; b < nb; ++b) {
        if (mask >> b & 1) fixed += bin_cost(b);
        else ub(2 * b) = std::min(ub(2 * b), r.lower(2 * b) + 1.0);
      }
      sub.upper = ub;
      const oracle::LpResult res = oracle_solve(sub);
      if (res.feasible) best = std::min(best, res.objective + fixed);
    }
    REQUIRE(std::isfinite(best));
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(best).epsilon(1e-7));
  }
}

TEST_CASE("LP export sanitises and disambiguates names") {
  MilpModel m;
  const int a = m.add_variable("1 bad:name", VarKind::Continuous, -INFINITY, INFINITY);
  const int b = m.add_variable("dup", VarKind::Binary, 0, 1);
  const int c = m.add_variable("dup", VarKind::Continuous, -2, INFINITY);
  const int e = m.add_variable("e1", VarKind::Continuous, -INFINITY, 3);
  m.objective = {{a, 1.0}, {b, -2.5}};
  m.add_row("row one", {{a, 1.0}, {c, 2.0}, {a, 1.0}}, Sense::LessEqual, 4, RowFamily::Plumbing);
  m.add_row("", {{b, 1.0}, {e, -1.0}}, Sense::Equal, 0, RowFamily::Plumbing);
  const std::string lp = write_lp(m);
  CHECK(lp.find("_1_bad_name free") != std::string::npos);
  CHECK(lp.find("dup_0") != std::string::npos);
  CHECK(lp.find("dup_1") != std::string::npos);
  CHECK(lp.find("-2 <= dup_1") == std::string::npos);
  CHECK(lp.find("dup_1 >= -2") != std::string::npos);
  CHECK(lp.find("-inf <= _e1 <= 3") != std::string::npos);
  CHECK(lp.find("row_one: 2 _1_bad_name + 2 dup_1 <= 4") != std::string::npos);
  CHECK(lp.find("r1: 1 dup_0 - 1 _e1 = 0") != std::string::npos);
  CHECK(lp.find("Binaries\n dup_0\n") != std::string::npos);

  const Solution s = parse_solution(
      m, "status optimal\nobjective 0\n_1_bad_name 1.5\ndup_0 0.9999999\ndup_1 0.25\n_e1 1\n");
  CHECK(s.status == Status::Optimal);
  CHECK(s.values(a) == 1.5);
  CHECK(s.values(b) == 1.0);
  CHECK(s.objective == doctest::Approx(1.5 - 2.5));
}

TEST_CASE("malformed solver output is a parse error") {
  MilpModel m;
  m.add_variable("x", VarKind::Continuous, 0, 1);
  for (const char* text : {"objective 1\nx 0\n", "status optimal\nx\n", "status optimal\ny 1\n",
                           "status maybe\n", "status optimal\nx abc\n", "status optimal\n"}) {
    INFO(text);
    try {
      parse_solution(m, text);
      FAIL("expected SolverParse");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SolverParse);
    }
  }
  CHECK_FALSE(parse_solution(m, "status infeasible\n").has_incumbent());
}

TEST_CASE("external solver failures are classified") {
  MilpModel m;
  m.add_variable("x", VarKind::Continuous, 0, 1);
  m.objective = {{0, 1.0}};
  // Echoes garbage into the solution file.
  const std::string echo = scratch_file("decoy_echo_solver.sh", "#!/bin/sh\necho \"$1\" > \"$2\"\n");
  try {
    solve_external(m, echo);
    FAIL("expected SolverParse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SolverParse);
  }
  const std::string silent = scratch_file("decoy_silent_solver.sh", "#!/bin/sh\nexit 3\n");
  try {
    solve_external(m, silent);
    FAIL("expected SolverParse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SolverParse);
  }
  try {
    solve_external(m, "/nonexistent/solver");
    FAIL("expected SolverSpawn");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SolverSpawn);
  }
  const std::string good =
      scratch_file("decoy_fixed_solver.sh", "#!/bin/sh\nprintf 'status optimal\\nx 0\\n' > \"$2\"\n");
  const Solution s = solve_external(m, good);
  CHECK(s.status == Status::Optimal);
  CHECK(s.objective == 0.0);
}

TEST_CASE("external HiGHS agrees with branch and bound") {
  if (!highspy_available()) {
    MESSAGE("highspy not importable; cross-check skipped");
    return;
  }
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 5; ++trial) {
    const Knapsack k = random_knapsack(rng, 10);
    const Solution ext = solve_external(k.model, "python3 " + kHighsScript);
    REQUIRE(ext.status == Status::Optimal);
    CHECK(ext.objective == doctest::Approx(knapsack_brute_force(k)));
  }
  const RandomLp r = random_lp(rng, 20, 2, 40);
  const Solution ext = solve_external(r.model, "python3 " + kHighsScript);
  REQUIRE(ext.status == Status::Optimal);
  CHECK(ext.objective == doctest::Approx(lp_relax(r.model).objective).epsilon(1e-7));
}
