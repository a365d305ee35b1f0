#pragma once

#include "sweep/geodesic.hpp"
#include "sweep/moving_set.hpp"
#include "sweep/set_curve.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sweep {

/// Jump-free moving set seen as an excess-Lipschitz curve with constant
/// max_lipschitz().
class MovingSetCurve : public SetCurve {
 public:
  /// Throws InvalidInput if the moving set has jumps.
  explicit MovingSetCurve(const MovingSet& m);

  Scalar horizon() const override { return m_->horizon(); }
  Scalar lipschitz() const override { return m_->max_lipschitz(); }
  Eigen::Index dim() const override { return m_->dim(); }
  std::vector<Scalar> breakpoints() const override { return m_->breakpoints(); }
  ConvexSet at(Scalar t) const override { return set_at(*m_, t, Side::kAt); }

 private:
  const MovingSet* m_;
};

/// Catching-up iterates y_j = Proj_{C(t_j)}(y_{j-1}) on the dyadic grid of
/// one level. Time is rescaled by the curve's Lipschitz constant so the
/// scheme runs on a 1-Lipschitz curve; `scaled_times` holds j / 2^level plus
/// the anchored breakpoints, `times` the same nodes in the caller's units.
struct DiscreteTrajectory {
  int level = 0;
  Scalar time_scale = 1;
  std::vector<Scalar> times;
  std::vector<Scalar> scaled_times;
  Matrix points;  // dim x size

  Eigen::Index size() const { return points.cols(); }
  Vector point(Eigen::Index j) const { return points.col(j); }
  /// y_j - y_{j-1}; zero for j = 0.
  Vector displacement(Eigen::Index j) const;
};

/// Grid of one dyadic level on [0, horizon] in scaled time, merged with the
/// scaled anchors. Returns (scaled, original) node pairs.
std::vector<std::pair<Scalar, Scalar>> dyadic_grid(Scalar horizon, Scalar scale, int level,
                                                   const std::vector<Scalar>& anchors);

DiscreteTrajectory catching_up(const SetCurve& curve, const Vector& y0, int level);
/// Throws InvalidInput if the moving set has jumps.
DiscreteTrajectory catching_up(const MovingSet& m, const Vector& y0, int level);

/// sup_t |y_{n+1}(t) - y_n(t)| for the step functions of two consecutive
/// levels, with the a priori bound (1 + 2^{n+1} T) / 2^{2n+2} on its square.
struct LevelGap {
  int level = 0;
  Scalar gap = 0;
  Scalar bound = 0;  // square root of the a priori bound
  Scalar worst_time = 0;
  bool within_bound = true;
};

LevelGap compare_levels(const DiscreteTrajectory& coarse, const DiscreteTrajectory& fine);

struct SolveOptions {
  Scalar target_tol = 1e-6;
  int min_level = 6;
  int max_level = 22;
  /// Cap on grid nodes of the finest level: the usable max level drops with
  /// the (scaled) horizon so that 2^level * T stays below this.
  long max_nodes = 1L << 23;
};

struct SolveStats {
  int level = 0;
  Scalar final_gap = 0;
  bool converged = false;
  Scalar time_scale = 1;
  std::vector<LevelGap> history;
};

enum class DensityMeasure { kLebesgue, kArcLength };

struct JumpRecord {
  Scalar t = 0;
  Vector left;
  Vector at;
  Vector right;
  Scalar ell_left = 0;
  Scalar ell_at = 0;
  Scalar ell_right = 0;
  /// (y(t+) - y(t-)) / (l(t+) - l(t-)).
  Vector density;
};

struct Trajectory {
  std::vector<Scalar> times;  // strictly increasing
  Matrix values;              // y(t) at each node; at jumps the middle value
  Matrix density;             // v at each node
  std::vector<Scalar> ell;    // l_C at each node
  std::vector<JumpRecord> jumps;
  DensityMeasure measure = DensityMeasure::kLebesgue;
  Vector initial_point;         // the given y0, possibly outside C(0)
  Vector initial_displacement;  // y(0) - y0
  SolveStats stats;

  Eigen::Index dim() const { return values.rows(); }
  Eigen::Index size() const { return values.cols(); }
  const JumpRecord* jump_at(Scalar t) const;
  /// Piecewise-affine interpolant (right-continuous at jumps).
  Vector value_at(Scalar t) const;
};

Trajectory solve_lipschitz(const SetCurve& curve, const Vector& y0, const SolveOptions& options = {});
/// Also fills `ell` from the arc length of m. Throws InvalidInput on jumps.
Trajectory solve_lipschitz(const MovingSet& m, const Vector& y0, const SolveOptions& options = {});

enum class FillKind {
  kGeodesic,
  /// Linear interpolation of ball centers and radii. Not a solution method;
  /// kept as a contrast case for the jump conditions.
  kLinearInterpolation,
};

struct ReparametrizeOptions {
  /// Arc-length samples per unit of time and Lipschitz constant.
  Scalar samples_per_unit = 4096;
  FillKind fill = FillKind::kGeodesic;
};

/// The moving set reparametrized by its retraction arc length, with every
/// jump bridged by fills. A 1-Lipschitz curve on [0, l_C(T)].
class Reparametrization : public SetCurve {
 public:
  enum class PieceKind { kSegment, kPlateau, kLeftFill, kRightFill };

  struct Piece {
    PieceKind kind;
    Scalar sigma_from;
    Scalar sigma_to;
    Scalar t_from;
    Scalar t_to;
  };

  struct Fill {
    Scalar t;
    bool left;  // C(t-) -> C(t), otherwise C(t) -> C(t+)
    Scalar sigma_from;
    Scalar sigma_to;
    GeodesicSegment geodesic;
    FillKind kind;
  };

  Reparametrization(MovingSet m, const ReparametrizeOptions& options = {});

  Scalar horizon() const override { return arc_.total; }
  Scalar lipschitz() const override { return 1.0; }
  Eigen::Index dim() const override { return m_.dim(); }
  std::vector<Scalar> breakpoints() const override { return anchors_; }
  ConvexSet at(Scalar sigma) const override;

  const MovingSet& moving_set() const { return m_; }
  const ArcLength& arc_length() const { return arc_; }
  const std::vector<Fill>& fills() const { return fills_; }
  /// Ordered description of the filled curve.
  std::vector<Piece> pieces() const;

  /// inf of the preimage of sigma under l_C, or the jump time for sigma
  /// inside a fill.
  Scalar to_time(Scalar sigma) const;
  Scalar to_sigma(Scalar t) const { return arc_.at(t); }
  /// Sampled times t with l_C(t) = sigma on a nondegenerate plateau.
  std::vector<Scalar> plateau_times(Scalar sigma) const;
  const Fill* fill_containing(Scalar sigma) const;

  /// max of e(C~(s), C~(u)) - (u - s) over random pairs s < u with exact
  /// excess; at most 0 up to sampling error of the arc length.
  Scalar lipschitz_defect(int pairs = 16, std::uint64_t seed = 7) const;

 private:
  struct Entry {
    Scalar sigma;
    Scalar t;
    Side side;
  };

  MovingSet m_;
  ArcLength arc_;
  std::vector<Entry> entries_;
  std::vector<Fill> fills_;
  std::vector<Scalar> anchors_;
};

/// Throws InexactExcessError if any excess on the arc-length grid or at a
/// jump is a sampled bound, and ConsistencyError if the filled curve fails
/// the 1-Lipschitz spot check by more than 1e-6 (1 + l_C(T)).
Reparametrization reparametrize(const MovingSet& m, const ReparametrizeOptions& options = {});

struct BrSolution {
  Trajectory trajectory;  // y = y_hat o l_C in time t
  Trajectory arc;         // y_hat in arc-length time sigma
};

BrSolution solve_br_full(const MovingSet& m, const Vector& y0, const SolveOptions& options = {},
                         const ReparametrizeOptions& reparam = {});
BrSolution solve_br_full(const Reparametrization& r, const Vector& y0, const SolveOptions& options = {});
Trajectory solve_br(const MovingSet& m, const Vector& y0, const SolveOptions& options = {});

struct DensitySample {
  Scalar t;
  Vector v;
  bool atom;
};

/// Density v of Dy with respect to Dl_C: y_hat' at continuity nodes, the
/// chord over the gap at jumps. Plateau nodes (Dl_C-null) are omitted.
std::vector<DensitySample> density(const Reparametrization& r, const Trajectory& arc,
                                   const std::vector<Scalar>& times);

}  // namespace sweep
