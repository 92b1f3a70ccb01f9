#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "drfeas/scenarios.hpp"

using namespace drfeas;

namespace {
constexpr double kPi = std::numbers::pi;

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}
}  // namespace

TEST(Registry, ContainsEveryPreset) {
  const auto names = list_scenarios();
  EXPECT_GE(names.size(), 15u);
  for (const char* n :
       {"hyperplane_epigraph", "halfspace_epigraph_plus", "halfspace_epigraph_minus",
        "no_slater_epigraph", "halfspace_halfspace", "hyperplane_ball",
        "hyperplane_ball_intersection", "union_of_balls", "finite_set_two_cycle",
        "finite_set_four_cycle", "finite_set_divergent", "line_ray", "line_cone", "polyhedron_2d",
        "r3_affine_orthant", "friedrichs_segment_square"})
    EXPECT_TRUE(has(names, n)) << n;
  EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
}

TEST(Build, TwoCycleDefaults) {
  const Problem p = build("finite_set_two_cycle");
  const auto* a = p.A.get_if<Hyperplane>();
  ASSERT_TRUE(a);
  EXPECT_EQ(a->u, (Vector{0, 1}));
  EXPECT_EQ(a->eta, 0.0);
  const auto* b = p.B.get_if<FiniteSet>();
  ASSERT_TRUE(b);
  EXPECT_EQ(b->points, (std::vector<Vector>{{0, -2}, {1, 2}, {-2, 0}}));
  EXPECT_EQ(p.x0, (Vector{0, -1}));
}

TEST(Build, OrthantDefaults) {
  const Problem p = build("r3_affine_orthant");
  const auto* a = p.A.get_if<AffineSubspace>();
  ASSERT_TRUE(a);
  EXPECT_EQ(a->L, (Matrix{{1, 1, 0}, {1, 0, 1}}));
  EXPECT_EQ(a->v, (Vector{1, 0}));
  ASSERT_TRUE(p.B.get_if<Orthant>());
  EXPECT_EQ(p.B.dim(), 3u);
  EXPECT_EQ(p.x0, (Vector{1. / 3, 2. / 3, 1. / 3}));
}

TEST(Build, LineRayPerpendicularBound) {
  const Problem p = build("line_ray", {{"theta", "1.5707963267948966"}});
  ASSERT_TRUE(p.expect.max_steps_to_converge);
  EXPECT_LE(*p.expect.max_steps_to_converge, 5u);
  EXPECT_NEAR(p.B.get_if<Ray2D>()->theta, kPi / 2, 1e-12);
}

TEST(Build, RejectsUnknownNamesAndParameters) {
  EXPECT_THROW(build("nope"), InvalidInput);
  EXPECT_THROW(build("finite_set_two_cycle", {{"theta", "1"}}), InvalidInput);
  EXPECT_THROW(build("hyperplane_ball", {{"theta", "abc"}}), InvalidInput);
  EXPECT_THROW(build("hyperplane_ball", {{"theta", "1.5"}}), InvalidInput);
  EXPECT_THROW(build("finite_set_divergent", {{"start", "0.5"}}), InvalidInput);
  EXPECT_THROW(build("line_ray", {{"x0", "1,2,3"}}), InvalidInput);
  EXPECT_THROW(build("line_cone", {{"theta1", "1"}, {"theta2", "0.5"}}), InvalidInput);
}

TEST(Build, OverridesApply) {
  EXPECT_EQ(build("line_ray", {{"x0", "3,-4"}}).x0, (Vector{3, -4}));
  EXPECT_EQ(build("finite_set_divergent", {{"start", "5"}}).x0, (Vector{5, -1}));
  EXPECT_TRUE(build("friedrichs_segment_square", {{"hulls", "true"}}).A.get_if<AffineSubspace>());
  EXPECT_EQ(build("hyperplane_ball", {{"theta", "0.25"}}).B.get_if<Ball>()->center, (Vector{0, 0.25}));
}

TEST(Run, EveryScenarioPassesWithDefaults) {
  for (const auto& name : list_scenarios()) {
    const RunResult r = run(name);
    std::string failed;
    for (const auto& c : r.verdict.checks)
      if (!c.ok) failed += c.field + " expected " + c.expected + " got " + c.actual + "; ";
    EXPECT_TRUE(r.verdict.pass()) << name << ": " << failed;
  }
}

TEST(Run, FourCycle) {
  const RunResult r = run("finite_set_four_cycle");
  EXPECT_EQ(r.report.status, Status::Cycle);
  EXPECT_EQ(r.report.cycle_period, 4u);
  EXPECT_TRUE(r.verdict.pass());
}

TEST(Run, OrthantIsLinear) {
  const RunResult r = run("r3_affine_orthant");
  EXPECT_EQ(r.report.status, Status::LinearConvergence);
  EXPECT_NEAR(*r.report.rate, 1 / std::sqrt(3.0), 0.01);
  EXPECT_LE(max_abs_diff(*r.report.limit, {1. / 3, 1, 1. / 3}), 1e-6);
}

TEST(Run, NoSlaterIsNeverFinite) {
  const RunResult r = run("no_slater_epigraph");
  EXPECT_NE(r.report.status, Status::FiniteConvergence);
  EXPECT_TRUE(r.verdict.pass());
}

TEST(Run, NoSlaterShadowDecreasesStrictly) {
  RunOptions o;
  o.max_iter = 100;
  o.fix_tol = 0;
  const RunResult r = run("no_slater_epigraph", {}, o);
  ASSERT_GE(r.trace.steps.size(), 40u);
  // strict decrease until the iterates reach the rounding floor
  for (std::size_t n = 1; n < 40; ++n) {
    const double prev = std::abs(r.trace.steps[n - 1].a[0]);
    const double cur = std::abs(r.trace.steps[n].a[0]);
    EXPECT_LT(cur, prev) << n;
  }
}

TEST(Run, FriedrichsHullRateMatchesCosine) {
  const RunResult r = run("friedrichs_segment_square", {{"hulls", "1"}});
  EXPECT_NEAR(*r.report.rate, 1 / std::sqrt(2.0), 0.01);
  EXPECT_TRUE(r.verdict.pass());
}

TEST(Run, HalfspaceEpigraphPlusWithinTwoSteps) {
  const Problem p = build("halfspace_epigraph_plus");
  for (const Vector& x0 : sample_starts(*p.start_box, 200, 17)) {
    Problem q = p;
    q.x0 = x0;
    const RunResult r = run(q);
    EXPECT_EQ(r.report.status, Status::FiniteConvergence) << x0;
    EXPECT_LE(r.report.n_stop, 2u) << x0;
  }
}

TEST(Run, VerdictFlagsMismatches) {
  Problem p = build("finite_set_two_cycle");
  p.expect.cycle_period = 3;
  const RunResult r = run(p);
  EXPECT_FALSE(r.verdict.pass());
  const auto bad = std::find_if(r.verdict.checks.begin(), r.verdict.checks.end(),
                                [](const FieldCheck& c) { return !c.ok; });
  ASSERT_NE(bad, r.verdict.checks.end());
  EXPECT_EQ(bad->field, "cycle_period");
}

TEST(SampleStarts, DeterministicAndInsideBox) {
  const Box box{{-1, 2}, {1, 3}};
  const auto a = sample_starts(box, 50, 9);
  EXPECT_EQ(a, sample_starts(box, 50, 9));
  EXPECT_NE(a, sample_starts(box, 50, 10));
  for (const auto& x : a) {
    EXPECT_GE(x[0], -1);
    EXPECT_LE(x[0], 1);
    EXPECT_GE(x[1], 2);
    EXPECT_LE(x[1], 3);
  }
}
