#pragma once

#include "sweep/common.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace sweep {

class ConvexSet;

struct Ball {
  Vector center;
  Scalar radius;
};

struct Box {
  Vector lo;
  Vector hi;
};

/// {x : <normal, x> >= offset}, normal of unit length.
struct HalfSpace {
  Vector normal;
  Scalar offset;
};

/// point + span(basis); basis columns are orthonormal.
struct AffineSubspace {
  Vector point;
  Matrix basis;
};

struct Translate {
  std::shared_ptr<const ConvexSet> base;
  Vector offset;
};

/// Minkowski sum base + D_radius.
struct Dilation {
  std::shared_ptr<const ConvexSet> base;
  Scalar radius;
};

struct DykstraOptions {
  Scalar tol = 1e-10;
  long max_iter = 100000;
};

struct Intersection {
  std::vector<ConvexSet> members;
  Vector witness;
  DykstraOptions options;
};

/// Closed convex nonempty subset of R^n. Immutable value type; copies share
/// their parameter storage.
class ConvexSet {
 public:
  using Shape = std::variant<Ball, Box, HalfSpace, AffineSubspace, Translate, Dilation, Intersection>;

  static ConvexSet ball(Vector center, Scalar radius);
  static ConvexSet box(Vector lo, Vector hi);
  /// Normal need not be unit; it is normalized together with the offset.
  static ConvexSet halfspace(Vector normal, Scalar offset);
  /// Basis columns are orthonormalized; an empty basis gives a single point.
  static ConvexSet affine(Vector point, Matrix basis);
  static ConvexSet point(Vector p);
  static ConvexSet translate(ConvexSet base, Vector offset);
  /// Raw Dilation node without normalization; prefer dilate().
  static ConvexSet dilation(ConvexSet base, Scalar radius);
  /// The witness certifies nonemptiness: it must lie in every member.
  static ConvexSet intersection(std::vector<ConvexSet> members, Vector witness,
                                DykstraOptions options = {});

  Eigen::Index dim() const { return dim_; }
  const Shape& shape() const { return *shape_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(shape_.get());
  }

  bool is_bounded() const;

  /// Structural equality (same shape tree, same parameters bit for bit).
  friend bool operator==(const ConvexSet& a, const ConvexSet& b);

 private:
  ConvexSet(Shape shape, Eigen::Index dim);

  std::shared_ptr<const Shape> shape_;
  Eigen::Index dim_ = 0;
};

/// sup_{v in K} <u, v>. `infinite` marks an unbounded direction; `exact` is
/// false only for intersections, where the value is min over members (an
/// upper bound).
struct SupportValue {
  Scalar value = 0;
  bool infinite = false;
  bool exact = true;
};

struct ExcessResult {
  Scalar value = 0;
  bool infinite = false;
  /// false: value is a sampled lower bound only.
  bool exact = true;
};

enum class ExcessMethod { kAuto, kClosedForm, kVertexEnum, kMonteCarlo };

struct ExcessOptions {
  ExcessMethod method = ExcessMethod::kAuto;
  int samples = 4096;
  std::uint64_t seed = 0x5eed;
};

Vector project(const ConvexSet& k, const Vector& x);
/// project() into a caller-owned buffer; `out` may alias `x`.
void project_into(const ConvexSet& k, const Vector& x, Vector& out);
Scalar distance(const ConvexSet& k, const Vector& x);
bool contains(const ConvexSet& k, const Vector& x, Scalar tol = kDefaultTol);
SupportValue support(const ConvexSet& k, const Vector& u);

/// Signed distance: d(x, K) outside K, minus the distance to the complement
/// inside. Convex in x, and sd_{K + D_r} = sd_K - r.
Scalar signed_distance(const ConvexSet& k, const Vector& x);

/// e(A, B) = sup_{a in A} d(a, B).
ExcessResult excess(const ConvexSet& a, const ConvexSet& b, const ExcessOptions& options = {});

/// K + D_r. Balls stay balls and nested dilations merge.
ConvexSet dilate(const ConvexSet& k, Scalar r);

/// u in N_K(x). Throws InvalidInput when x is farther than tol from K.
bool in_normal_cone(const ConvexSet& k, const Vector& x, const Vector& u, Scalar tol = kDefaultTol);

/// Rewrites translates into the shifted primitive and pulls dilations to the
/// top, so that excess sees at most one Dilation node over a primitive.
ConvexSet canonicalize(const ConvexSet& k);

}  // namespace sweep
