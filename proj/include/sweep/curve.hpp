#pragma once

#include "sweep/common.hpp"

#include <vector>

namespace sweep {

/// Piecewise polynomial t -> R. A single global polynomial uses powers of t;
/// pieces built with `local` use powers of (t - from).
class ScalarCurve {
 public:
  struct Piece {
    Scalar from;
    Scalar to;
    std::vector<Scalar> coeffs;  // ascending powers
    bool local;
  };

  ScalarCurve() : ScalarCurve(0.0) {}
  /* implicit */ ScalarCurve(Scalar constant);
  static ScalarCurve polynomial(std::vector<Scalar> coeffs);
  /// Pieces must be sorted and contiguous.
  static ScalarCurve piecewise(std::vector<Piece> pieces);

  Scalar operator()(Scalar t) const;
  const std::vector<Piece>& pieces() const { return pieces_; }

 private:
  explicit ScalarCurve(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {}
  std::vector<Piece> pieces_;
};

class VectorCurve {
 public:
  VectorCurve() = default;
  explicit VectorCurve(std::vector<ScalarCurve> components) : components_(std::move(components)) {}
  static VectorCurve constant(const Vector& v);

  Vector operator()(Scalar t) const;
  Eigen::Index dim() const { return static_cast<Eigen::Index>(components_.size()); }

 private:
  std::vector<ScalarCurve> components_;
};

}  // namespace sweep
