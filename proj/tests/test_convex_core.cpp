#include "sweep/convex_set.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace sweep;

namespace {

Vector v2(Scalar a, Scalar b) { return (Vector(2) << a, b).finished(); }
Vector v3(Scalar a, Scalar b, Scalar c) { return (Vector(3) << a, b, c).finished(); }

Vector gaussian(std::mt19937_64& rng, Eigen::Index n, Scalar scale = 1) {
  std::normal_distribution<Scalar> d(0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

/// Brute-force excess: max distance to B over a dense sample of A's boundary.
Scalar sampled_ball_excess(const Ball& a, const ConvexSet& b, int samples) {
  Scalar best = 0;
  for (int i = 0; i < samples; ++i) {
    const Scalar th = 2 * M_PI * i / samples;
    best = std::max(best, distance(b, a.center + a.radius * v2(std::cos(th), std::sin(th))));
  }
  return best;
}

}  // namespace

TEST(Projection, BallClosedForm) {
  const ConvexSet b = ConvexSet::ball(v2(1, 0), 2);
  EXPECT_TRUE(project(b, v2(1, 1)).isApprox(v2(1, 1)));
  EXPECT_TRUE(project(b, v2(5, 0)).isApprox(v2(3, 0)));
  EXPECT_NEAR(distance(b, v2(1, 5)), 3, 1e-15);
}

TEST(Projection, BoxClampsEachCoordinate) {
  const ConvexSet b = ConvexSet::box(v2(0, 0), v2(1, 2));
  EXPECT_TRUE(project(b, v2(-1, 3)).isApprox(v2(0, 2)));
  EXPECT_TRUE(project(b, v2(0.5, 1)).isApprox(v2(0.5, 1)));
}

TEST(Projection, HalfSpaceIsNormalizedOnConstruction) {
  const ConvexSet h = ConvexSet::halfspace(v2(0, 2), 2);  // {y >= 1}
  const auto* hs = h.as<HalfSpace>();
  ASSERT_NE(hs, nullptr);
  EXPECT_NEAR(hs->normal.norm(), 1, 1e-15);
  EXPECT_NEAR(hs->offset, 1, 1e-15);
  EXPECT_TRUE(project(h, v2(3, -1)).isApprox(v2(3, 1)));
}

TEST(Projection, AffineLine) {
  Matrix basis(2, 1);
  basis << 1, 1;
  const ConvexSet line = ConvexSet::affine(v2(0, 0), basis);
  EXPECT_TRUE(project(line, v2(2, 0)).isApprox(v2(1, 1)));
}

TEST(Projection, IntersectionMatchesHandComputedPoint) {
  const ConvexSet cap = ConvexSet::intersection(
      {ConvexSet::ball(v2(0, 0), 1), ConvexSet::halfspace(v2(1, 0), 0.5)}, v2(0.75, 0));
  EXPECT_LT((project(cap, v2(-2, 0)) - v2(0.5, 0)).norm(), 1e-8);
  // Corner of the cap: (0.5, sqrt(0.75)).
  const Vector corner = v2(0.5, std::sqrt(0.75));
  EXPECT_LT((project(cap, corner + v2(-1, 0.2)) - corner).norm(), 1e-7);
}

TEST(Projection, VariationalInequalityOnRandomSamples) {
  std::mt19937_64 rng(1);
  const std::vector<ConvexSet> sets{
      ConvexSet::ball(v3(1, -1, 0), 1.5), ConvexSet::box(v3(-1, 0, 0), v3(1, 2, 0.5)),
      ConvexSet::halfspace(v3(1, 2, -1), 0.3),
      ConvexSet::intersection({ConvexSet::ball(v3(0, 0, 0), 1), ConvexSet::box(v3(0, 0, 0), v3(2, 2, 2))},
                              v3(0.1, 0.1, 0.1)),
      dilate(ConvexSet::box(v3(0, 0, 0), v3(1, 1, 1)), 0.5)};
  for (const auto& k : sets) {
    for (int i = 0; i < 200; ++i) {
      const Vector x = gaussian(rng, 3, 3);
      const Vector p = project(k, x);
      EXPECT_LT(distance(k, p), 1e-7);
      // <x - P x, v - P x> <= 0 for points v of K.
      for (int j = 0; j < 5; ++j) {
        const Vector v = project(k, gaussian(rng, 3, 3));
        EXPECT_LE((x - p).dot(v - p), 1e-6);
      }
    }
  }
}

TEST(Excess, BallPairClosedFormAgreesWithBoundarySampling) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<Scalar> r(0.1, 2);
  for (int i = 0; i < 50; ++i) {
    const Ball a{gaussian(rng, 2, 2), r(rng)};
    const ConvexSet b = ConvexSet::ball(gaussian(rng, 2, 2), r(rng));
    const ExcessResult e = excess(ConvexSet::ball(a.center, a.radius), b);
    ASSERT_TRUE(e.exact);
    EXPECT_NEAR(e.value, sampled_ball_excess(a, b, 20000), 1e-4);
  }
}

TEST(Excess, BoxVertexEnumerationAgreesWithSampling) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<Scalar> u(0, 1);
  const ConvexSet box = ConvexSet::box(v2(-1, 0), v2(2, 1));
  const ConvexSet ball = ConvexSet::ball(v2(0.5, 0.5), 0.8);
  const ExcessResult e = excess(box, ball);
  ASSERT_TRUE(e.exact);
  Scalar sampled = 0;
  for (int i = 0; i < 20000; ++i) sampled = std::max(sampled, distance(ball, v2(-1 + 3 * u(rng), u(rng))));
  EXPECT_GE(e.value, sampled - 1e-12);
  EXPECT_NEAR(e.value, std::hypot(1.5, 0.5) - 0.8, 1e-12);
}

TEST(Excess, HalfSpacesAndUnboundedSets) {
  const ConvexSet h0 = ConvexSet::halfspace(v2(1, 0), 0);
  const ConvexSet h1 = ConvexSet::halfspace(v2(1, 0), 1);
  EXPECT_NEAR(excess(h0, h1).value, 1, 1e-15);
  EXPECT_EQ(excess(h1, h0).value, 0);
  EXPECT_TRUE(excess(h0, ConvexSet::halfspace(v2(0, 1), 0)).infinite);
  EXPECT_TRUE(excess(h0, ConvexSet::ball(v2(0, 0), 5)).infinite);
  EXPECT_EQ(excess(ConvexSet::ball(v2(3, 0), 1), h0).value, 0);
}

TEST(Excess, AffineSubspaces) {
  Matrix ex(2, 1);
  ex << 1, 0;
  const ConvexSet l0 = ConvexSet::affine(v2(0, 0), ex);
  const ConvexSet l1 = ConvexSet::affine(v2(0, 2), ex);
  EXPECT_NEAR(excess(l0, l1).value, 2, 1e-15);
  Matrix ey(2, 1);
  ey << 0, 1;
  EXPECT_TRUE(excess(l0, ConvexSet::affine(v2(0, 0), ey)).infinite);
}

TEST(Excess, RigidCopiesOfAnIntersection) {
  const ConvexSet lens = ConvexSet::intersection({ConvexSet::ball(v2(0, 0.6), 1), ConvexSet::ball(v2(0, -0.6), 1)},
                                                 v2(0, 0));
  const ConvexSet moved = ConvexSet::translate(lens, v2(0.3, 0.4));
  const ExcessResult e = excess(lens, moved);
  ASSERT_TRUE(e.exact);
  EXPECT_NEAR(e.value, 0.5, 1e-15);
  ExcessOptions mc;
  mc.method = ExcessMethod::kMonteCarlo;
  const ExcessResult lower = excess(lens, moved, mc);
  EXPECT_FALSE(lower.exact);
  EXPECT_LE(lower.value, e.value + 1e-9);
  EXPECT_GT(lower.value, e.value - 0.05);
}

TEST(Excess, MonteCarloIsFlaggedInexact) {
  const ConvexSet lens = ConvexSet::intersection({ConvexSet::ball(v2(0, 0.6), 1), ConvexSet::ball(v2(0, -0.6), 1)},
                                                 v2(0, 0));
  const ExcessResult e = excess(lens, ConvexSet::ball(v2(0, 0), 0.2));
  EXPECT_FALSE(e.exact);
  // Corners (+-0.8, 0) are the farthest points: 0.8 - 0.2.
  EXPECT_LE(e.value, 0.6 + 1e-9);
  EXPECT_GT(e.value, 0.55);
}

TEST(SignedDistance, DilationShiftsByRadius) {
  std::mt19937_64 rng(4);
  const ConvexSet box = ConvexSet::box(v2(0, 0), v2(1, 1));
  const ConvexSet fat = dilate(box, 0.7);
  for (int i = 0; i < 200; ++i) {
    const Vector x = gaussian(rng, 2, 2);
    EXPECT_NEAR(signed_distance(fat, x), signed_distance(box, x) - 0.7, 1e-9);
  }
  EXPECT_NEAR(signed_distance(box, v2(0.5, 0.5)), -0.5, 1e-15);
}

TEST(Support, BallAndBox) {
  const SupportValue s = support(ConvexSet::ball(v2(1, 2), 3), v2(0, 2));
  EXPECT_NEAR(s.value, 4 + 6, 1e-15);
  EXPECT_NEAR(support(ConvexSet::box(v2(0, -1), v2(1, 1)), v2(1, -1)).value, 2, 1e-15);
  EXPECT_TRUE(support(ConvexSet::halfspace(v2(1, 0), 0), v2(0, 1)).infinite);
}

TEST(NormalCone, BoundaryAndInterior) {
  const ConvexSet b = ConvexSet::ball(v2(0, 0), 1);
  EXPECT_TRUE(in_normal_cone(b, v2(1, 0), v2(2, 0)));
  EXPECT_FALSE(in_normal_cone(b, v2(1, 0), v2(0, 1)));
  EXPECT_TRUE(in_normal_cone(b, v2(0, 0), v2(0, 0)));
  EXPECT_FALSE(in_normal_cone(b, v2(0, 0), v2(1, 0)));
  EXPECT_THROW(in_normal_cone(b, v2(3, 0), v2(1, 0)), InvalidInput);
  const ConvexSet ramp = ConvexSet::halfspace((Vector(1) << 1).finished(), 2);
  EXPECT_TRUE(in_normal_cone(ramp, (Vector(1) << 2).finished(), (Vector(1) << -1).finished()));
}

TEST(Canonicalize, PushesTranslatesAndDilations) {
  const ConvexSet t = ConvexSet::translate(ConvexSet::ball(v2(0, 0), 1), v2(2, 3));
  const ConvexSet c = canonicalize(t);
  ASSERT_NE(c.as<Ball>(), nullptr);
  EXPECT_TRUE(c.as<Ball>()->center.isApprox(v2(2, 3)));
  const ConvexSet h = canonicalize(ConvexSet::dilation(ConvexSet::halfspace(v2(1, 0), 1), 0.25));
  ASSERT_NE(h.as<HalfSpace>(), nullptr);
  EXPECT_NEAR(h.as<HalfSpace>()->offset, 0.75, 1e-15);
  EXPECT_NEAR(dilate(ConvexSet::ball(v2(0, 0), 1), 2).as<Ball>()->radius, 3, 1e-15);
}

TEST(Errors, DimensionAndParameterChecks) {
  EXPECT_THROW(project(ConvexSet::ball(v2(0, 0), 1), v3(0, 0, 0)), DimensionError);
  EXPECT_THROW(ConvexSet::ball(v2(0, 0), -1), InvalidInput);
  EXPECT_THROW(ConvexSet::box(v2(1, 0), v2(0, 1)), InvalidInput);
  EXPECT_THROW(ConvexSet::intersection({ConvexSet::ball(v2(0, 0), 1), ConvexSet::ball(v2(5, 0), 1)}, v2(0, 0)),
               InvalidInput);
  EXPECT_THROW(dilate(ConvexSet::ball(v2(0, 0), 1), -0.5), InvalidInput);
}

TEST(Errors, DykstraNonConvergenceIsReported) {
  DykstraOptions opts;
  opts.max_iter = 1;
  const ConvexSet lens = ConvexSet::intersection(
      {ConvexSet::ball(v2(0, 0.6), 1), ConvexSet::ball(v2(0, -0.6), 1)}, v2(0, 0), opts);
  EXPECT_THROW(project(lens, v2(3, 0.1)), ProjectionError);
}
