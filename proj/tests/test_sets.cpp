#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "drfeas/sets.hpp"
#include "support/properties.hpp"

using namespace drfeas;
using drfeas::testing::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

void expect_near(const Vector& got, const Vector& want, double tol) {
  ASSERT_EQ(got.dim(), want.dim());
  EXPECT_LE(max_abs_diff(got, want), tol) << "got " << got << ", want " << want;
}

const Matrix kL{{1, 1, 0}, {1, 0, 1}};

}  // namespace

TEST(Project, HyperplaneDropsCoordinate) {
  expect_near(project(Set::hyperplane({0, 1}, 0), {3, 4}).selected, {3, 0}, 0);
}

TEST(Project, BallRadial) {
  expect_near(project(Set::ball({0, 0}, 1), {2, 0}).selected, {1, 0}, 0);
  expect_near(project(Set::ball({0, 0}, 1), {0.3, 0.4}).selected, {0.3, 0.4}, 0);
}

TEST(Project, AffineSubspaceAgainstLeastSquares) {
  const Set A = Set::affine_subspace(kL, {1, 0});
  const Vector p = project(A, {1. / 3, 2. / 3, 1. / 3}).selected;
  expect_near(p, {1. / 9, 8. / 9, -1. / 9}, 1e-15);
  expect_near(kL * p, {1, 0}, 1e-15);
  // residual x - p must be orthogonal to the null space of L, spanned by (1,-1,-1)
  EXPECT_NEAR(dot(Vector{1. / 3, 2. / 3, 1. / 3} - p, Vector{1, -1, -1}), 0.0, 1e-15);
}

TEST(Project, FiniteSetNearestAndTie) {
  const Set B = Set::finite({{0, 1}, {1, 2}});
  const auto r = project(B, {2, 1});
  expect_near(r.selected, {1, 2}, 0);
  EXPECT_DOUBLE_EQ(r.distance, std::sqrt(2.0));

  const auto tie = project(Set::finite({{-1, 0}, {1, 0}}), {0, 0});
  ASSERT_EQ(tie.all.size(), 2u);
  expect_near(tie.selected, {-1, 0}, 0);
  expect_near(tie.all[1], {1, 0}, 0);
}

TEST(Project, HalfspaceInsideIsIdentity) {
  const Set H = Set::halfspace({0, 1}, 0);
  expect_near(project(H, {5, -2}).selected, {5, -2}, 0);
  expect_near(project(H, {5, 2}).selected, {5, 0}, 0);
}

TEST(Project, OrthantClamps) {
  expect_near(project(Set::orthant(3), {-1, 2, -3}).selected, {0, 2, 0}, 0);
}

TEST(Project, RayAndCone) {
  expect_near(project(Set::ray2d(kPi / 2), {3, -2}).selected, {0, 0}, 1e-16);
  expect_near(project(Set::ray2d(kPi / 2), {3, 2}).selected, {0, 2}, 1e-15);
  const Set C = Set::cone2d(0, kPi / 2);
  expect_near(project(C, {1, 2}).selected, {1, 2}, 0);
  expect_near(project(C, {-1, 2}).selected, {0, 2}, 1e-15);
  expect_near(project(C, {-1, -1}).selected, {0, 0}, 1e-15);
}

TEST(Project, ConeOrientationIndependentOfArgumentOrder) {
  Rng g(8);
  const Set c1 = Set::cone2d(kPi / 3, -kPi / 4);
  const Set c2 = Set::cone2d(-kPi / 4, kPi / 3);
  for (int k = 0; k < 200; ++k) {
    const Vector x = drfeas::testing::random_vector(g, 2);
    expect_near(project(c1, x).selected, project(c2, x).selected, 0);
  }
}

TEST(Project, ConeBruteForce) {
  Rng g(9);
  for (int k = 0; k < 200; ++k) {
    const double t1 = drfeas::testing::uniform(g, -kPi, kPi);
    const double t2 = t1 + drfeas::testing::uniform(g, 0.05, kPi - 0.05);
    const Set C = Set::cone2d(t1, t2);
    const Vector x = drfeas::testing::random_vector(g, 2);
    // dense sampling of the cone; a point between two sampled rays at angular
    // spacing h is missed by at most ||x|| sin(h/2)
    double best = norm(x);
    for (int i = 0; i <= 400; ++i) {
      const Vector e = direction2d(t1 + (t2 - t1) * i / 400.0);
      best = std::min(best, distance(x, std::max(dot(x, e), 0.0) * e));
    }
    EXPECT_LE(distance(C, x), best + 1e-12);
    EXPECT_GE(distance(C, x), best - norm(x) * std::sin((t2 - t1) / 800.0) - 1e-12);
  }
}

TEST(Project, PolyhedronTriangleVerticesAndEdges) {
  const Set T = Set::polyhedron(
      {Halfspace{{0, -1}, 1}, Halfspace{{3, 2}, 7}, Halfspace{{-3, 2}, 1}});
  expect_near(project(T, {1, 0}).selected, {1, 0}, 0);
  expect_near(project(T, {1, -5}).selected, {1, -1}, 1e-15);
  expect_near(project(T, {-3, -3}).selected, {-1, -1}, 1e-14);
  expect_near(project(T, {1, 5}).selected, {1, 2}, 1e-14);
  EXPECT_THROW(Set::polyhedron({Halfspace{{1, 0}, -1}, Halfspace{{-1, 0}, -1}}), InvalidInput);
}

TEST(Project, PolyhedronAgainstDenseSampling) {
  Rng g(21);
  for (int k = 0; k < 100; ++k) {
    std::vector<Halfspace> hs;
    for (int i = 0; i < 5; ++i)
      hs.push_back(Halfspace{drfeas::testing::random_direction(g, 2), drfeas::testing::uniform(g, 0.5, 3)});
    const Set P = Set::polyhedron(hs);
    const Vector x = drfeas::testing::random_vector(g, 2);
    const Vector p = project(P, x).selected;
    EXPECT_TRUE(membership(P, p, Tolerance{1e-9, 0}));
    for (int i = 0; i < 2000; ++i) {
      const Vector y = drfeas::testing::random_member(g, P);
      EXPECT_LE(distance(x, p), distance(x, y) + 1e-10);
    }
  }
}

TEST(Project, BallIntersectionLens) {
  const Set lens = Set::ball_intersection({Ball{{0, 0.5}, 1}, Ball{{0.5, 0}, 1}});
  // far below the lens the nearest point is the lower corner of the lens
  Rng g(4);
  for (int k = 0; k < 300; ++k) {
    const Vector x = drfeas::testing::random_vector(g, 2, 4.0);
    const Vector p = project(lens, x).selected;
    EXPECT_TRUE(membership(lens, p, Tolerance{1e-9, 0}));
    for (int i = 0; i < 200; ++i) {
      const Vector y = drfeas::testing::random_member(g, lens);
      EXPECT_LE(distance(x, p), distance(x, y) + 1e-10);
    }
  }
}

TEST(ProjectEpigraph, Examples) {
  expect_near(project_epigraph(ConvexFn::linear({0}, 0), {5, -2}).selected, {5, 0}, 1e-14);
  expect_near(project_epigraph(ConvexFn::quadratic(), {0, -1}).selected, {0, 0}, 1e-14);
  expect_near(project_epigraph(ConvexFn::linear({1}, 0), {1, -1}).selected, {0, 0}, 1e-14);
  expect_near(project_epigraph(ConvexFn::quadratic(), {3, 10}).selected, {3, 10}, 0);
}

TEST(ProjectEpigraph, LinearMatchesHalfplaneFormula) {
  Rng g(31);
  for (int k = 0; k < 500; ++k) {
    const Vector a = drfeas::testing::random_vector(g, 2, 3.0);
    const double c = drfeas::testing::uniform(g, -3, 3);
    const Vector z = drfeas::testing::random_vector(g, 3);
    // epi = { <(a,-1), z> <= -c }
    const Vector p = project(Set::halfspace({a[0], a[1], -1}, -c), z).selected;
    expect_near(project_epigraph(ConvexFn::linear(a, c), z).selected, p, 1e-10);
  }
}

TEST(ProjectEpigraph, DescentBetweenRhoAndValue) {
  Rng g(32);
  const ConvexFn f = ConvexFn::quadratic(1.0);
  for (int k = 0; k < 500; ++k) {
    const Vector x = drfeas::testing::random_vector(g, 2, 3.0);
    const double rho = f.value(x) - drfeas::testing::uniform(g, 0.01, 5);
    const Vector q = project_epigraph(f, {x[0], x[1], rho}).selected;
    const double fp = f.value(Vector{q[0], q[1]});
    EXPECT_GT(fp, rho - 1e-9);
    EXPECT_LE(fp, f.value(x) + 1e-9);
    EXPECT_NEAR(q[2], fp, 1e-12);
  }
}

TEST(ProjectEpigraph, LowerCapMatchesHalfBallOutsideTheDisk) {
  // below the centre height and outside the disk the epigraph is locally the
  // lower half-ball
  const double theta = 0.5;
  const ConvexFn f = ConvexFn::lower_cap(theta);
  const Vector q = project_epigraph(f, {3, -1}).selected;
  const Vector d = Vector{3, -1} - Vector{0, theta};
  expect_near(q, Vector{0, theta} + d / norm(d), 1e-15);
  expect_near(project_epigraph(f, {3, 2}).selected, {1, 2}, 0);
}

TEST(ProjectEpigraph, ProxOptimality) {
  // x - p in t * grad f(p)
  Rng g(33);
  for (const ConvexFn& f : {ConvexFn::quadratic(), ConvexFn::lower_cap(0.2)}) {
    for (int k = 0; k < 300; ++k) {
      const Vector x = drfeas::testing::random_vector(g, 2, 0.6);
      const double t = drfeas::testing::uniform(g, 0.01, 3);
      const Vector p = f.prox(t, x);
      EXPECT_LE(max_abs_diff(x - p, t * f.subgradient(p)), 1e-9) << f.name();
    }
  }
}

TEST(Reflect, Examples) {
  expect_near(reflect(Set::hyperplane({0, 1}, 0), {3, 4}).selected, {3, -4}, 0);
  const Set A = Set::affine_subspace(kL, {1, 0});
  Rng g(6);
  const Matrix M{{-1, -2, -2}, {-2, -1, 2}, {-2, 2, -1}};
  for (int k = 0; k < 100; ++k) {
    const Vector x = drfeas::testing::random_vector(g, 3);
    expect_near(reflect(A, x).selected, (1.0 / 3.0) * (M * x + Vector{2, 4, -2}), 1e-13);
  }
}

TEST(Reflect, FixesMembers) {
  Rng g(7);
  for (const auto& [label, s] : drfeas::testing::random_convex_sets(g)) {
    const Vector p = project(s, drfeas::testing::random_vector(g, s.dim())).selected;
    expect_near(reflect(s, p).selected, p, 1e-10);
  }
}

TEST(Membership, Examples) {
  EXPECT_TRUE(membership(Set::orthant(3), {0, 1, 0}));
  EXPECT_FALSE(membership(Set::halfspace({0, 1}, 0), {0, 1e-6}, Tolerance{1e-9, 0}));
  EXPECT_TRUE(membership(Set::ball({0, 0}, 1), {1, 0}));
}

TEST(Distance, Examples) {
  EXPECT_DOUBLE_EQ(distance(Set::finite({{0, 1}, {1, 2}}), {0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(distance(Set::hyperplane({0, 1}, 0), {7, -3}), 3.0);
  EXPECT_NEAR(distance(Set::cone2d(0, kPi / 2), {-1, -1}), std::sqrt(2.0), 1e-15);
}

TEST(SetFactories, RejectInvalidParameters) {
  EXPECT_THROW(Set::hyperplane({0, 0}, 1), InvalidInput);
  EXPECT_THROW(Set::halfspace({}, 1), InvalidInput);
  EXPECT_THROW(Set::ball({0, 0}, 0), InvalidInput);
  EXPECT_THROW(Set::ball({0, 0}, -1), InvalidInput);
  EXPECT_THROW(Set::finite({}), InvalidInput);
  EXPECT_THROW(Set::finite({{0, 0}, {1, 2, 3}}), InvalidInput);
  EXPECT_THROW(Set::ray2d(4.0), InvalidInput);
  EXPECT_THROW(Set::cone2d(0, kPi), InvalidInput);
  EXPECT_THROW(Set::cone2d(1, 1), InvalidInput);
  EXPECT_THROW(Set::orthant(0), InvalidInput);
  EXPECT_THROW(Set::affine_subspace(Matrix{{1, 1}, {2, 2}}, {1, 0}), InvalidInput);
  EXPECT_THROW(Set::polyhedron({Halfspace{{1, 0, 0, 0}, 1}}), InvalidInput);
  EXPECT_THROW(Set::epigraph(ConvexFn::linear({1, 2}, 0), 1), InvalidInput);
}

TEST(SetFactories, DisjointUnionChecksComponents) {
  EXPECT_THROW(Set::disjoint_union({Set::ball({0, 0}, 1), Set::ball({1.5, 0}, 1)}), InvalidInput);
  EXPECT_THROW(Set::disjoint_union({Set::ball({0, 0}, 1), Set::finite({{5, 5}, {6, 6}})}),
               InvalidInput);
  EXPECT_THROW(Set::disjoint_union({Set::ball({0, 0}, 1), Set::ball({0, 0, 5}, 1)}), InvalidInput);
  EXPECT_NO_THROW(Set::disjoint_union({Set::ball({0, 0}, 1), Set::ball({2.5, 0}, 1)}));
}

TEST(Project, DimensionMismatchThrows) {
  EXPECT_THROW(project(Set::ball({0, 0}, 1), {1, 2, 3}), InvalidInput);
  EXPECT_THROW(project_epigraph(ConvexFn::linear({1, 1}, 0), {1, 2}), InvalidInput);
}

TEST(Project, UnionSelectsNearestComponentLowestIndexOnTies) {
  const Set U = Set::disjoint_union({Set::ball({-2, 0}, 1), Set::ball({2, 0}, 1)});
  expect_near(project(U, {3, 1}).selected, Vector{2, 0} + Vector{1, 1} / std::sqrt(2.0), 1e-15);
  const auto tie = project(U, {0, 0});
  ASSERT_EQ(tie.all.size(), 2u);
  expect_near(tie.selected, {-1, 0}, 0);
}

TEST(ProjectionResult, CandidatesAreMembersAtMinimalDistance) {
  Rng g(12);
  for (int k = 0; k < 200; ++k) {
    for (const auto& [label, s] : drfeas::testing::random_nonconvex_sets(g)) {
      const Vector x = drfeas::testing::random_vector(g, s.dim());
      const auto r = project(s, x);
      EXPECT_EQ(r.selected, r.all.front());
      for (const Vector& a : r.all) {
        EXPECT_TRUE(membership(s, a, Tolerance{1e-9, 0})) << label;
        EXPECT_LE(distance(x, a) - r.distance, kTieTol * (1 + r.distance));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Randomized property suites (the acceptance runner uses the same code)
// ---------------------------------------------------------------------------

namespace {
void expect_property(const drfeas::testing::PropertyResult& r, std::size_t min_instances) {
  EXPECT_GE(r.instances, min_instances) << r.name;
  EXPECT_EQ(r.failures, 0u) << r.name << ": worst excess " << r.worst << " first at "
                            << r.first_failure;
}
}  // namespace

TEST(Properties, Idempotence) { expect_property(drfeas::testing::projector_idempotence(100, 1), 1000); }
TEST(Properties, FirmNonexpansive) { expect_property(drfeas::testing::firm_nonexpansiveness(100, 2), 1000); }
TEST(Properties, ReflectorNonexpansive) {
  expect_property(drfeas::testing::reflector_nonexpansiveness(100, 3), 1000);
}
TEST(Properties, VariationalInequality) {
  expect_property(drfeas::testing::variational_inequality(100, 4), 1000);
}
TEST(Properties, OptimalityBySampling) {
  expect_property(drfeas::testing::optimality_by_sampling(100, 5), 1000);
}
TEST(Properties, EpigraphInequality) { expect_property(drfeas::testing::epigraph_inequality(1000, 6), 1000); }
TEST(Properties, SubsetConsistency) { expect_property(drfeas::testing::subset_consistency(1000, 7), 1000); }
