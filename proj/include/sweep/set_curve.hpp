#pragma once

#include "sweep/convex_set.hpp"

#include <vector>

namespace sweep {

/// A convex-set-valued curve on [0, horizon()] that is Lipschitz with respect
/// to the excess: e(C(s), C(t)) <= lipschitz() * (t - s) for s < t.
class SetCurve {
 public:
  virtual ~SetCurve() = default;

  virtual Scalar horizon() const = 0;
  virtual Scalar lipschitz() const = 0;
  virtual Eigen::Index dim() const = 0;
  /// Interior times that every time grid must contain.
  virtual std::vector<Scalar> breakpoints() const = 0;
  virtual ConvexSet at(Scalar t) const = 0;
};

}  // namespace sweep
