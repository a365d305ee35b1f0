#pragma once

#include "sweep/convex_set.hpp"
#include "sweep/set_curve.hpp"

namespace sweep {

/// Excess geodesic from A to B: F(0) = A, F(t) = B + D_{(1-t) rho} for
/// 0 < t <= 1, with rho = e(A, B). Along it e(F(s), F(t)) = (t - s) rho.
class GeodesicSegment : public SetCurve {
 public:
  GeodesicSegment(ConvexSet a, ConvexSet b, Scalar rho) : a_(std::move(a)), b_(std::move(b)), rho_(rho) {}

  const ConvexSet& from() const { return a_; }
  const ConvexSet& to() const { return b_; }
  Scalar rho() const { return rho_; }

  /// F(t); `right_limit` at t = 0 gives F(0+) = B + D_rho instead of A.
  ConvexSet at(Scalar t, bool right_limit) const;

  ConvexSet at(Scalar t) const override { return at(t, false); }
  Scalar horizon() const override { return 1.0; }
  Scalar lipschitz() const override { return rho_; }
  Eigen::Index dim() const override { return a_.dim(); }
  std::vector<Scalar> breakpoints() const override { return {}; }

 private:
  ConvexSet a_;
  ConvexSet b_;
  Scalar rho_;
};

/// Throws InexactExcessError when e(A, B) is only a sampled bound, and
/// InvalidInput when it is infinite.
GeodesicSegment geodesic(const ConvexSet& a, const ConvexSet& b);

/// Closed-form solution of the sweeping process driven by a geodesic: the
/// point rests until the shrinking dilation of B reaches it at t0, then moves
/// straight to its projection on B.
struct GeodesicPath {
  Vector start;
  Vector target;  // project(B, start)
  Scalar t0;
  Scalar rho;

  Vector at(Scalar t) const;
  /// y'(t) away from t0.
  Vector velocity(Scalar t) const;
};

/// `start` must lie in A within tol.
GeodesicPath geodesic_solution(const GeodesicSegment& f, const Vector& start, Scalar tol = kDefaultTol);
GeodesicPath geodesic_solution(const ConvexSet& a, const ConvexSet& b, const Vector& start, Scalar tol = kDefaultTol);

}  // namespace sweep
