#pragma once

#include "sweep/convex_set.hpp"
#include "sweep/curve.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace sweep {

struct BallPath {
  VectorCurve center;
  ScalarCurve radius;
};

struct BoxPath {
  VectorCurve lo;
  VectorCurve hi;
};

struct HalfSpacePath {
  Vector normal;
  ScalarCurve offset;
};

struct AffinePath {
  VectorCurve point;
  Matrix basis;
};

/// A fixed set moved by `shift(t)` and inflated by `grow(t)`:
/// (base + shift(t)) + D_grow(t).
struct RigidPath {
  ConvexSet base;
  std::optional<VectorCurve> shift;
  std::optional<ScalarCurve> grow;
};

using SetFamily = std::variant<BallPath, BoxPath, HalfSpacePath, AffinePath, RigidPath>;

ConvexSet evaluate(const SetFamily& family, Scalar t);

struct Segment {
  Scalar from;
  Scalar to;
  SetFamily family;
  /// Declared excess-Lipschitz constant on [from, to].
  Scalar lipschitz;
};

/// Declared jump. Omitted one-sided sets default to the adjacent segment's
/// limit; at t = 0 the left set is C(0) and at t = T the right set is C(T).
struct JumpSpec {
  Scalar t;
  std::optional<ConvexSet> left;
  ConvexSet at;
  std::optional<ConvexSet> right;
};

struct Jump {
  Scalar t;
  ConvexSet left;
  ConvexSet at;
  ConvexSet right;
  /// e(C(t-), C(t)) and e(C(t), C(t+)).
  Scalar left_mass;
  Scalar right_mass;
  bool exact;
};

enum class Side { kLeft, kAt, kRight };

/// Time-dependent convex set on [0, T]: Lipschitz segments joined at declared
/// jumps. Immutable after construction.
class MovingSet {
 public:
  MovingSet(Scalar horizon, std::vector<Segment> segments, std::vector<JumpSpec> jumps = {});

  Scalar horizon() const { return horizon_; }
  Eigen::Index dim() const { return dim_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  bool has_jumps() const { return !jumps_.empty(); }
  Scalar max_lipschitz() const;

  /// Jump declared at t (matched to within 1e-12 relative), or null.
  const Jump* jump_at(Scalar t) const;
  /// Index of the segment holding t for right-side evaluation.
  std::size_t segment_index(Scalar t) const;
  /// Segment joints and jump times strictly inside (0, T), sorted.
  std::vector<Scalar> breakpoints() const;

  /// Family value ignoring jumps: the segment holding t, or the one ending
  /// at t when `from_left`.
  ConvexSet family_at(Scalar t, bool from_left = false) const;

 private:
  Scalar horizon_;
  Eigen::Index dim_ = 0;
  std::vector<Segment> segments_;
  std::vector<Jump> jumps_;
};

/// C(t-), C(t) or C(t+).
ConvexSet set_at(const MovingSet& m, Scalar t, Side side);

struct Retraction {
  Scalar value = 0;
  /// value plus the Lipschitz allowance of every continuous sub-interval.
  Scalar upper = 0;
  bool exact = true;
};

/// Partition sum of excesses over [a, b], refined by every breakpoint, plus
/// the one-sided jump masses that fall inside.
Retraction retraction(const MovingSet& m, Scalar a, Scalar b, const std::vector<Scalar>& partition = {});

struct JumpAtom {
  Scalar t;
  Scalar left_mass;
  Scalar right_mass;
};

/// Sampled l_C(t) = ret(C; [0, t]).
struct ArcLength {
  std::vector<Scalar> grid;
  std::vector<Scalar> values;
  std::vector<JumpAtom> atoms;
  Scalar total = 0;
  bool exact = true;

  /// Linear interpolation between grid nodes; exact at nodes.
  Scalar at(Scalar t) const;
  Scalar left_limit(Scalar t) const;
  Scalar right_limit(Scalar t) const;
  const JumpAtom* atom_at(Scalar t) const;
};

/// The grid is merged with {0, T} and every breakpoint.
ArcLength arc_length(const MovingSet& m, const std::vector<Scalar>& grid);

/// Uniform grid on every continuous piece, about `per_unit` nodes per unit of
/// time and Lipschitz constant (at least 8 per piece).
std::vector<Scalar> uniform_grid(const MovingSet& m, Scalar per_unit);

std::vector<JumpAtom> jump_times(const MovingSet& m);

}  // namespace sweep
