#include "sweep/verification.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sweep;

namespace {

Vector v1(Scalar a) { return (Vector(1) << a).finished(); }
Vector v2(Scalar a, Scalar b) { return (Vector(2) << a, b).finished(); }

SolveOptions quick() {
  SolveOptions o;
  o.max_level = 14;
  return o;
}

MovingSet ramp() {
  return MovingSet(2, {Segment{0, 2, HalfSpacePath{v1(1), ScalarCurve::polynomial({0, 1})}, 1}});
}

MovingSet translating_ball() {
  return MovingSet(2, {Segment{0, 2, BallPath{VectorCurve({ScalarCurve::polynomial({0, 1}), 0.0}), 1.0}, 1}});
}

MovingSet expanding_ball() {
  return MovingSet(1, {Segment{0, 1, BallPath{VectorCurve::constant(v2(0, 0)), ScalarCurve::polynomial({1, 1})}, 0}});
}

MovingSet ball_jump() {
  return MovingSet(2,
                   {Segment{0, 1, BallPath{VectorCurve::constant(v2(0, 0)), 1.0}, 0},
                    Segment{1, 2, BallPath{VectorCurve::constant(v2(4, 0)), 1.0}, 0}},
                   {JumpSpec{1, std::nullopt, ConvexSet::ball(v2(4, 0), 1), std::nullopt}});
}

}  // namespace

TEST(Constraint, SolverOutputPassesAndPerturbationFails) {
  const MovingSet m = translating_ball();
  Trajectory y = solve_lipschitz(m, v2(0, 0), quick());
  EXPECT_TRUE(check_constraint(y, m).passed);
  y.values(1, 100) += 1.5;
  const CheckReport r = check_constraint(y, m);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.location, y.times[100]);
}

TEST(Constraint, ChecksJumpSides) {
  const MovingSet m = ball_jump();
  Trajectory y = solve_br(m, v2(0, 0), quick());
  EXPECT_TRUE(check_constraint(y, m).passed);
  y.jumps.front().left = v2(3, 0);
  EXPECT_FALSE(check_constraint(y, m).passed);
}

TEST(JumpConditions, GeodesicFillPassesLinearFillFails) {
  const MovingSet m = ball_jump();
  const Trajectory good = solve_br(m, v2(0, 0.9), quick());
  EXPECT_TRUE(check_jump_conditions(good, m).passed);

  ReparametrizeOptions linear;
  linear.fill = FillKind::kLinearInterpolation;
  const Trajectory bad = solve_br_full(m, v2(0, 0.9), quick(), linear).trajectory;
  const CheckReport r = check_jump_conditions(bad, m);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.residual, 1e-3);
}

TEST(JumpConditions, VacuousWithoutJumpsAndFailsWithoutRecord) {
  const MovingSet m = translating_ball();
  EXPECT_TRUE(check_jump_conditions(solve_lipschitz(m, v2(0, 0), quick()), m).passed);
  Trajectory y = solve_br(ball_jump(), v2(0, 0), quick());
  y.jumps.clear();
  EXPECT_FALSE(check_jump_conditions(y, ball_jump()).passed);
}

TEST(Contraction, TwoSolutionsApproachEachOther) {
  const MovingSet m = translating_ball();
  const DiscreteTrajectory y = catching_up(m, v2(0, 0), 10);
  EXPECT_TRUE(check_contraction(y, catching_up(m, v2(0.5, 0), 10)).passed);
  const CheckReport same = check_contraction(y, y);
  EXPECT_TRUE(same.passed);
  EXPECT_EQ(same.residual, 0);
}

TEST(Contraction, RampCollapsesImmediately) {
  const DiscreteTrajectory y = catching_up(ramp(), v1(-1), 8);
  const DiscreteTrajectory z = catching_up(ramp(), v1(0), 8);
  EXPECT_TRUE(check_contraction(y, z).passed);
  for (Eigen::Index j = 1; j < y.size(); ++j) EXPECT_EQ(y.point(j), z.point(j));
}

TEST(Contraction, DetectsGrowthAndGridMismatch) {
  DiscreteTrajectory y = catching_up(translating_ball(), v2(0, 0), 6);
  DiscreteTrajectory z = y;
  z.points(1, 10) += 0.1;
  EXPECT_FALSE(check_contraction(y, z).passed);
  EXPECT_THROW(check_contraction(y, catching_up(translating_ball(), v2(0, 0), 7)), InvalidInput);
}

TEST(ProjectionEstimate, EqualSetsAndPointsInside) {
  const ConvexSet a = ConvexSet::ball(v2(0, 0), 1);
  EXPECT_TRUE(check_projection_estimate(a, a, v2(3, 1), v2(-2, 0.5)).passed);
  const ConvexSet b = ConvexSet::ball(v2(2, 0), 1);
  const CheckReport r = check_projection_estimate(a, b, v2(0.5, 0), v2(2, 0.5));
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.residual, 0, 1e-15);
}

TEST(ProjectionEstimate, RandomBallsAndBoxes) {
  std::mt19937_64 rng(5);
  std::normal_distribution<Scalar> g(0, 2);
  std::uniform_real_distribution<Scalar> r(0.05, 2);
  for (int i = 0; i < 1000; ++i) {
    const ConvexSet a = ConvexSet::ball(v2(g(rng), g(rng)), r(rng));
    const Vector lo = v2(g(rng), g(rng));
    const ConvexSet b = ConvexSet::box(lo, lo + v2(r(rng), r(rng)));
    EXPECT_TRUE(check_projection_estimate(a, b, v2(g(rng), g(rng)), v2(g(rng), g(rng))).passed);
  }
}

TEST(ProjectionEstimate, RefusesInexactExcess) {
  const ConvexSet lens = ConvexSet::intersection({ConvexSet::ball(v2(0, 0.6), 1), ConvexSet::ball(v2(0, -0.6), 1)},
                                                 v2(0, 0));
  EXPECT_THROW(check_projection_estimate(lens, ConvexSet::ball(v2(0, 0), 0.2), v2(1, 1), v2(0, 0)),
               InexactExcessError);
}

TEST(Integral, SelectionEqualToSolutionGivesZero) {
  const MovingSet m = ramp();
  const Trajectory y = solve_lipschitz(m, v1(0), quick());
  // P_{[t, inf)} 0 = t = y(t).
  EXPECT_NEAR(integral_inequality(y, m, v1(0)), 0, 1e-12);
}

TEST(Integral, TranslatingBallProbesAndSignFlip) {
  const MovingSet m = translating_ball();
  const Trajectory y = solve_lipschitz(m, v2(0, 0));
  const std::vector<Vector> probes{v2(0, 0), v2(5, 5), v2(-3, 1)};
  EXPECT_TRUE(check_integral_inequality(y, m, probes).passed);
  const std::vector<Scalar> flipped = integral_inequalities(y, m, probes, true);
  EXPECT_GT(*std::max_element(flipped.begin(), flipped.end()), 1e-3);
  EXPECT_THROW(check_integral_inequality(y, ball_jump(), probes), InvalidInput);
}

TEST(Variation, ConstantRampAndJump) {
  const Trajectory still = solve_br(expanding_ball(), v2(3, 0), quick());
  EXPECT_EQ(variation(still), 0);
  const Trajectory r = solve_lipschitz(ramp(), v1(0), quick());
  EXPECT_NEAR(variation(r), 2, 1e-9);
  EXPECT_NEAR(variation(r, 0.5, 1.5), 1, 1e-9);
  const Trajectory j = solve_br(ball_jump(), v2(0, 0), quick());
  EXPECT_NEAR(variation(j), 3, 1e-9);
  EXPECT_NEAR(variation(j, 0, 0.9), 0, 1e-12);
  const DiscreteTrajectory d = catching_up(ramp(), v1(0), 8);
  EXPECT_NEAR(variation(d), 2, 1e-12);
}

TEST(NormalCone, SolverOutputPassesCorruptedDensityFails) {
  const MovingSet m = translating_ball();
  Trajectory y = solve_lipschitz(m, v2(0, 0.5), quick());
  EXPECT_TRUE(check_normal_cone_residuals(y, m).passed);
  EXPECT_TRUE(check_normal_cone_residuals(solve_lipschitz(ramp(), v1(0), quick()), ramp()).passed);
  y.density = -y.density;
  EXPECT_FALSE(check_normal_cone_residuals(y, m).passed);
}

TEST(NormalCone, VacuousWhenNothingMoves) {
  const MovingSet m = expanding_ball();
  const CheckReport r = check_normal_cone_residuals(solve_lipschitz(m, v2(3, 0), quick()), m);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.residual, 0);
}
