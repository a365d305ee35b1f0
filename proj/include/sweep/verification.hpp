#pragma once

#include "sweep/moving_set.hpp"
#include "sweep/solver.hpp"

#include <string>
#include <vector>

namespace sweep {

/// Outcome of one check. `passed` holds exactly when residual <= tolerance.
struct CheckReport {
  std::string name;
  bool passed = true;
  Scalar residual = 0;
  /// Time (or index, for index-based checks) of the worst residual.
  Scalar location = 0;
  Scalar tolerance = 0;
  std::string detail;
};

/// max_t d(y(t), C(t)); at jumps also the left and right values against
/// C(t-) and C(t+).
CheckReport check_constraint(const Trajectory& y, const MovingSet& m, Scalar tol = 1e-8);

/// At every jump of m: y(t) = P_{C(t)} y(t-) and y(t+) = P_{C(t+)} y(t).
CheckReport check_jump_conditions(const Trajectory& y, const MovingSet& m, Scalar tol = 1e-6);

/// j -> |y_j - z_j| nonincreasing up to 1e-12. Throws InvalidInput when
/// the grids differ.
CheckReport check_contraction(const DiscreteTrajectory& y, const DiscreteTrajectory& z, Scalar tol = 1e-12);

/// |P_A x - P_B y|^2 - |x - y|^2 <= 2 d(x, A) e(B, A) + 2 d(y, B) e(A, B).
/// The residual is left side minus right side. Throws InexactExcessError
/// when either excess is a sampled bound.
CheckReport check_projection_estimate(const ConvexSet& a, const ConvexSet& b, const Vector& x, const Vector& y,
                                      Scalar tol = 1e-9);

/// Trapezoidal value of the integral of <y - z, y'> over [0, T] with
/// z(t) = P_{C(t)} w; `flip` integrates <z - y, y'> instead.
Scalar integral_inequality(const Trajectory& y, const MovingSet& m, const Vector& w, bool flip = false);
/// One value per probe, sharing the set evaluations.
std::vector<Scalar> integral_inequalities(const Trajectory& y, const MovingSet& m, const std::vector<Vector>& probes,
                                          bool flip = false);

/// Every probe must give an integral <= tol * (1 + T). Throws InvalidInput
/// when m has jumps.
CheckReport check_integral_inequality(const Trajectory& y, const MovingSet& m, const std::vector<Vector>& probes,
                                      Scalar tol = 1e-5);

/// Sum of |y(t_j) - y(t_{j-1})| over nodes in [a, b] plus the jump parts
/// |y(t) - y(t-)| and |y(t+) - y(t)|.
Scalar variation(const Trajectory& y, Scalar a, Scalar b);
Scalar variation(const Trajectory& y);
Scalar variation(const DiscreteTrajectory& y, Scalar a, Scalar b);
Scalar variation(const DiscreteTrajectory& y);

/// -v(t) in N_{C(t)}(y(t)) at continuity nodes with |v| > tol, tested with
/// tolerance tol * (1 + |v|). Residuals are reported divided by (1 + |v|).
CheckReport check_normal_cone_residuals(const Trajectory& y, const MovingSet& m, Scalar tol = 1e-6);

}  // namespace sweep
