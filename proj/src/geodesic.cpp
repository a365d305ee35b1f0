#include "sweep/geodesic.hpp"

#include <algorithm>

namespace sweep {

ConvexSet GeodesicSegment::at(Scalar t, bool right_limit) const {
  if (!(t >= 0 && t <= 1)) throw InvalidInput("geodesic: parameter outside [0, 1]");
  if (t == 0 && !right_limit) return a_;
  return dilate(b_, (1 - t) * rho_);
}

GeodesicSegment geodesic(const ConvexSet& a, const ConvexSet& b) {
  const ExcessResult e = excess(a, b);
  if (!e.exact) throw InexactExcessError("geodesic: excess is only a sampled lower bound");
  if (e.infinite) throw InvalidInput("geodesic: infinite excess");
  return GeodesicSegment(a, b, e.value);
}

Vector GeodesicPath::at(Scalar t) const {
  if (t <= t0 || t0 >= 1) return start;
  if (t >= 1) return target;
  return start + ((t - t0) / (1 - t0)) * (target - start);
}

Vector GeodesicPath::velocity(Scalar t) const {
  if (t < t0 || t0 >= 1 || t > 1) return Vector::Zero(start.size());
  return (target - start) / (1 - t0);
}

GeodesicPath geodesic_solution(const GeodesicSegment& f, const Vector& start, Scalar tol) {
  check_dim(f.dim(), start.size(), "geodesic_solution");
  if (distance(f.from(), start) > tol) throw InvalidInput("geodesic_solution: initial point is not in A");
  const Vector target = project(f.to(), start);
  const Scalar gap = (start - target).norm();
  if (gap <= tol) return {start, target, 1.0, f.rho()};
  if (f.rho() == 0) throw InvalidInput("geodesic_solution: e(A, B) = 0 but the initial point is outside B");
  const Scalar t0 = std::clamp<Scalar>(1 - gap / f.rho(), 0, 1);
  return {start, target, t0, f.rho()};
}

GeodesicPath geodesic_solution(const ConvexSet& a, const ConvexSet& b, const Vector& start, Scalar tol) {
  return geodesic_solution(geodesic(a, b), start, tol);
}

}  // namespace sweep
