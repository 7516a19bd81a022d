#include "support.hpp"

#include <doctest.h>

using namespace decoy;
using testsupport::uniform;

namespace {

struct Layout {
  std::vector<Vec3> decoys;
  std::vector<Vec3> targets;
  SequentialAssignment assignment;
};

Layout random_layout(std::mt19937_64& rng, int m, int n, double diameter) {
  for (;;) {
    Layout l;
    for (int i = 0; i < m; ++i) {
      l.decoys.emplace_back(uniform(rng, -4000, 4000), uniform(rng, -4000, 4000), uniform(rng, 10, 400));
    }
    for (int j = 0; j < n; ++j) {
      l.targets.emplace_back(uniform(rng, -3000, 3000), uniform(rng, -3000, 3000), uniform(rng, 200, 700));
    }
    Eigen::MatrixXd w(m, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) w(i, j) = inf_norm(l.targets[j] - l.decoys[i]);
    }
    l.assignment = sequential_bottleneck(w);
    if (l.assignment.min_margin() > diameter) return l;
  }
}

Vec3 sample_in(std::mt19937_64& rng, const Box& b) {
  return Vec3(uniform(rng, b.lower(0), b.upper(0)), uniform(rng, b.lower(1), b.upper(1)),
              uniform(rng, b.lower(2), b.upper(2)));
}

}  // namespace

TEST_CASE("coordination variable") {
  const double mu = 500, d = 2, v = 39, Ts = 2;
  CHECK(coordination_eta(0.0, mu, d, v, Ts) == doctest::Approx(249));
  CHECK(coordination_eta(Ts, mu, d, v, Ts) == doctest::Approx(249));
  CHECK(coordination_eta(3.0, mu, d, v, Ts) == doctest::Approx(39 * 3 + 249));
}

TEST_CASE("safe sets start at the decoy and end at the target") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const Layout l = random_layout(rng, 5, 3, 2.0);
    const SafeSetPlan plan = make_safe_sets(l.decoys, l.targets, l.assignment, 2.0, 39.0, 2.0);
    for (int i = 0; i < 5; ++i) {
      const Box b0 = safe_box(plan.decoys[i], 0.0);
      CHECK(b0.contains(l.decoys[i]));
      const Polyhedron poly = local_safe_set(plan.decoys[i], 0.0);
      CHECK(poly.rows() == (plan.decoys[i].target ? 12 : 6));
      if (plan.decoys[i].target) {
        const Box late = safe_box(plan.decoys[i], 1e4);
        CHECK(late.contains(*plan.decoys[i].target));
      }
    }
  }
}

TEST_CASE("any in-set positions keep assigned decoys apart") {
  std::mt19937_64 rng(59);
  const double d = 2.0;
  for (int trial = 0; trial < 8; ++trial) {
    const Layout l = random_layout(rng, 6, 4, d);
    const SafeSetPlan plan = make_safe_sets(l.decoys, l.targets, l.assignment, d, 39.0, 2.0);
    for (int s = 0; s < 200; ++s) {
      const double t = uniform(rng, 0, 150);
      std::vector<Vec3> pos;
      for (const SafeSetSpec& spec : plan.decoys) pos.push_back(sample_in(rng, safe_box(spec, t)));
      CHECK(check_collision_free(pos, plan, t).empty());
    }
  }
}

TEST_CASE("margins not exceeding the diameter are rejected") {
  std::vector<Vec3> decoys = {Vec3(0, 0, 10), Vec3(1, 0, 10)};
  std::vector<Vec3> targets = {Vec3(500, 0, 300)};
  Eigen::MatrixXd w(2, 1);
  w << inf_norm(targets[0] - decoys[0]), inf_norm(targets[0] - decoys[1]);
  const SequentialAssignment s = sequential_bottleneck(w);
  CHECK(s.min_margin() <= 2.0);
  try {
    make_safe_sets(decoys, targets, s, 2.0, 39.0, 2.0);
    FAIL("expected InfeasibleSafeSet");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleSafeSet);
  }
}

TEST_CASE("lone decoy has an unbounded safe set") {
  Eigen::MatrixXd w(1, 1);
  w << 300;
  const SequentialAssignment s = sequential_bottleneck(w);
  const SafeSetPlan plan = make_safe_sets({Vec3(0, 0, 50)}, {Vec3(300, 0, 300)}, s, 2.0, 39.0, 2.0);
  const Box b = safe_box(plan.decoys[0], 10.0);
  CHECK(b.contains(Vec3(1e7, -1e7, 1e7)));
  CHECK(local_safe_set(plan.decoys[0], 10.0).rows() == 0);
}
