#include "sweep/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sweep {

namespace {

Matrix slopes(const std::vector<Scalar>& times, const Matrix& points) {
  const Eigen::Index n = points.cols();
  Matrix v = Matrix::Zero(points.rows(), n);
  for (Eigen::Index j = 1; j < n; ++j) {
    const Scalar dt = times[static_cast<std::size_t>(j)] - times[static_cast<std::size_t>(j - 1)];
    if (dt > 0) v.col(j) = (points.col(j) - points.col(j - 1)) / dt;
  }
  if (n > 1) v.col(0) = v.col(1);
  return v;
}

int effective_max_level(const SolveOptions& o, Scalar scaled_horizon) {
  int cap = o.max_level;
  if (scaled_horizon > 0) {
    const Scalar fit = std::floor(std::log2(static_cast<Scalar>(o.max_nodes) / scaled_horizon));
    if (fit < cap) cap = static_cast<int>(std::max<Scalar>(fit, 0));
  }
  return std::max(cap, o.min_level + 1);
}

Trajectory single_node(const Vector& y0, const Vector& y_start) {
  Trajectory out;
  out.times = {0.0};
  out.values = y_start;
  out.density = Matrix::Zero(y_start.size(), 1);
  out.initial_point = y0;
  out.initial_displacement = y_start - y0;
  out.stats.converged = true;
  return out;
}

}  // namespace

MovingSetCurve::MovingSetCurve(const MovingSet& m) : m_(&m) {
  if (m.has_jumps()) throw InvalidInput("moving set has jumps; use the bounded-retraction solver");
}

Vector DiscreteTrajectory::displacement(Eigen::Index j) const {
  if (j == 0) return Vector::Zero(points.rows());
  return points.col(j) - points.col(j - 1);
}

std::vector<std::pair<Scalar, Scalar>> dyadic_grid(Scalar horizon, Scalar scale, int level,
                                                   const std::vector<Scalar>& anchors) {
  if (level < 0 || level > 40) throw InvalidInput("dyadic level must lie in [0, 40]");
  const Scalar scaled_horizon = scale * horizon;
  const auto count = static_cast<long long>(std::floor(std::ldexp(scaled_horizon, level)));
  std::vector<std::pair<Scalar, Scalar>> grid;
  grid.reserve(static_cast<std::size_t>(count) + anchors.size() + 2);
  for (long long j = 0; j <= count; ++j) {
    const Scalar tau = std::ldexp(static_cast<Scalar>(j), -level);
    if (tau > scaled_horizon) break;
    grid.emplace_back(tau, scale == 1 ? tau : tau / scale);
  }
  for (Scalar a : anchors) {
    if (a > 0 && a < horizon) grid.emplace_back(scale * a, a);
  }
  grid.emplace_back(scaled_horizon, horizon);
  std::stable_sort(grid.begin(), grid.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<std::pair<Scalar, Scalar>> out;
  out.reserve(grid.size());
  for (const auto& node : grid) {
    if (!out.empty() && node.first == out.back().first) {
      // Keep the caller's exact time for anchors and the horizon.
      out.back().second = node.second;
      continue;
    }
    out.push_back(node);
  }
  return out;
}

DiscreteTrajectory catching_up(const SetCurve& curve, const Vector& y0, int level) {
  check_dim(curve.dim(), y0.size(), "catching_up");
  const Scalar lip = curve.lipschitz();
  DiscreteTrajectory out;
  out.level = level;
  out.time_scale = lip > 0 ? lip : 1.0;
  const auto grid = dyadic_grid(curve.horizon(), out.time_scale, level, curve.breakpoints());
  out.times.reserve(grid.size());
  out.scaled_times.reserve(grid.size());
  out.points.resize(curve.dim(), static_cast<Eigen::Index>(grid.size()));
  Vector y = y0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    try {
      project_into(curve.at(grid[j].second), y, y);
    } catch (const ProjectionError& e) {
      throw ProjectionError(std::string("catching_up step ") + std::to_string(j) + ": " + e.what(),
                            static_cast<std::ptrdiff_t>(j));
    }
    out.scaled_times.push_back(grid[j].first);
    out.times.push_back(grid[j].second);
    out.points.col(static_cast<Eigen::Index>(j)) = y;
  }
  return out;
}

DiscreteTrajectory catching_up(const MovingSet& m, const Vector& y0, int level) {
  return catching_up(MovingSetCurve(m), y0, level);
}

LevelGap compare_levels(const DiscreteTrajectory& coarse, const DiscreteTrajectory& fine) {
  if (fine.level != coarse.level + 1) throw InvalidInput("compare_levels: levels must be consecutive");
  LevelGap out;
  out.level = coarse.level;
  const auto& ct = coarse.scaled_times;
  const auto& ft = fine.scaled_times;
  std::size_t c = 0;
  for (std::size_t i = 0; i < ft.size(); ++i) {
    while (c + 1 < ct.size() && ct[c + 1] <= ft[i]) ++c;
    const Scalar g = (fine.points.col(static_cast<Eigen::Index>(i)) - coarse.points.col(static_cast<Eigen::Index>(c))).norm();
    if (g > out.gap) {
      out.gap = g;
      out.worst_time = fine.times[i];
    }
  }
  const Scalar horizon = ct.empty() ? 0 : ct.back();
  const int n = coarse.level;
  const Scalar bound_sq = (1 + std::ldexp(horizon, n + 1)) / std::ldexp(1.0, 2 * n + 2);
  out.bound = std::sqrt(bound_sq);
  out.within_bound = out.gap * out.gap <= bound_sq * (1 + 1e-9) + 1e-24;
  return out;
}

const JumpRecord* Trajectory::jump_at(Scalar t) const {
  for (const auto& j : jumps) {
    if (j.t == t) return &j;
  }
  return nullptr;
}

Vector Trajectory::value_at(Scalar t) const {
  if (times.empty()) throw InvalidInput("empty trajectory");
  if (t <= times.front()) return values.col(0);
  if (t >= times.back()) return values.col(size() - 1);
  auto it = std::lower_bound(times.begin(), times.end(), t);
  const auto i = static_cast<Eigen::Index>(std::distance(times.begin(), it));
  if (times[static_cast<std::size_t>(i)] == t) return values.col(i);
  const Scalar t0 = times[static_cast<std::size_t>(i - 1)];
  const Scalar t1 = times[static_cast<std::size_t>(i)];
  Vector lo = values.col(i - 1);
  if (const JumpRecord* j = jump_at(t0)) lo = j->right;
  Vector hi = values.col(i);
  if (const JumpRecord* j = jump_at(t1)) hi = j->left;
  return lo + ((t - t0) / (t1 - t0)) * (hi - lo);
}

Trajectory solve_lipschitz(const SetCurve& curve, const Vector& y0, const SolveOptions& options) {
  check_dim(curve.dim(), y0.size(), "solve_lipschitz");
  if (options.min_level < 0 || options.max_level < options.min_level || !(options.target_tol > 0)) {
    throw InvalidInput("solve_lipschitz: invalid options");
  }
  const Vector start = project(curve.at(0), y0);
  if (curve.horizon() == 0) return single_node(y0, start);

  const Scalar lip = curve.lipschitz();
  const Scalar scale = lip > 0 ? lip : 1.0;
  const int max_level = effective_max_level(options, scale * curve.horizon());

  SolveStats stats;
  stats.time_scale = scale;
  DiscreteTrajectory coarse = catching_up(curve, y0, options.min_level);
  DiscreteTrajectory fine;
  for (int n = options.min_level;; ++n) {
    fine = catching_up(curve, y0, n + 1);
    const LevelGap gap = compare_levels(coarse, fine);
    stats.history.push_back(gap);
    if (!gap.within_bound) {
      throw ConsistencyError("dyadic Cauchy bound violated at level " + std::to_string(n) + ", t = " +
                                 std::to_string(gap.worst_time) + " (gap " + std::to_string(gap.gap) + " > bound " +
                                 std::to_string(gap.bound) + ")",
                             n, gap.worst_time);
    }
    stats.level = n + 1;
    stats.final_gap = gap.gap;
    if (gap.gap <= options.target_tol) {
      stats.converged = true;
      break;
    }
    if (n + 1 >= max_level) break;
    coarse = std::move(fine);
  }

  Trajectory out;
  out.times = std::move(fine.times);
  out.values = std::move(fine.points);
  out.density = slopes(out.times, out.values);
  out.initial_point = y0;
  out.initial_displacement = start - y0;
  out.stats = std::move(stats);
  return out;
}

Trajectory solve_lipschitz(const MovingSet& m, const Vector& y0, const SolveOptions& options) {
  Trajectory out = solve_lipschitz(MovingSetCurve(m), y0, options);
  const ArcLength arc = arc_length(m, uniform_grid(m, 4096));
  out.ell.reserve(out.times.size());
  for (Scalar t : out.times) out.ell.push_back(arc.at(t));
  out.measure = DensityMeasure::kLebesgue;
  return out;
}

// ---------------------------------------------------------------------------
// Reparametrization

Reparametrization::Reparametrization(MovingSet m, const ReparametrizeOptions& options) : m_(std::move(m)) {
  if (!(options.samples_per_unit > 0)) throw InvalidInput("reparametrize: samples_per_unit must be > 0");
  for (const auto& j : m_.jumps()) {
    if (!j.exact) throw InexactExcessError("reparametrize: jump excess at t = " + std::to_string(j.t) + " is inexact");
  }
  arc_ = sweep::arc_length(m_, uniform_grid(m_, options.samples_per_unit));
  if (!arc_.exact) throw InexactExcessError("reparametrize: arc length relies on inexact excess");

  for (std::size_t i = 0; i < arc_.grid.size(); ++i) {
    const Scalar t = arc_.grid[i];
    const Scalar v = arc_.values[i];
    if (const Jump* j = m_.jump_at(t)) {
      entries_.push_back({v - j->left_mass, t, Side::kLeft});
      entries_.push_back({v, t, Side::kAt});
      entries_.push_back({v + j->right_mass, t, Side::kRight});
    } else {
      entries_.push_back({v, t, Side::kAt});
    }
  }

  auto make_fill = [&](Scalar t, bool left, Scalar from, Scalar to, const ConvexSet& a, const ConvexSet& b,
                       Scalar rho) {
    if (options.fill == FillKind::kLinearInterpolation &&
        (canonicalize(a).as<Ball>() == nullptr || canonicalize(b).as<Ball>() == nullptr)) {
      throw InvalidInput("reparametrize: linear-interpolation fills are only defined between balls");
    }
    fills_.push_back(Fill{t, left, from, to, GeodesicSegment(a, b, rho), options.fill});
  };
  for (const auto& j : m_.jumps()) {
    const Scalar at = arc_.at(j.t);
    if (j.left_mass > 0) make_fill(j.t, true, at - j.left_mass, at, j.left, j.at, j.left_mass);
    if (j.right_mass > 0) make_fill(j.t, false, at, at + j.right_mass, j.at, j.right, j.right_mass);
  }

  const Scalar total = arc_.total;
  auto anchor = [&](Scalar s) {
    if (s > 0 && s < total) anchors_.push_back(s);
  };
  for (const auto& f : fills_) {
    anchor(f.sigma_from);
    anchor(f.sigma_to);
  }
  for (Scalar t : m_.breakpoints()) {
    const Scalar s = arc_.at(t);
    anchor(arc_.left_limit(t));
    anchor(s);
    anchor(arc_.right_limit(t));
  }
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].sigma == entries_[i - 1].sigma && entries_[i].t != entries_[i - 1].t) anchor(entries_[i].sigma);
  }
  std::sort(anchors_.begin(), anchors_.end());
  anchors_.erase(std::unique(anchors_.begin(), anchors_.end()), anchors_.end());

  const Scalar defect = lipschitz_defect();
  if (defect > 1e-6 * (1 + total)) {
    throw ConsistencyError("reparametrize: filled curve is not 1-Lipschitz (defect " + std::to_string(defect) + ")",
                           -1, 0);
  }
}

Scalar Reparametrization::lipschitz_defect(int pairs, std::uint64_t seed) const {
  const Scalar total = arc_.total;
  if (total <= 0) return 0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Scalar> u(0, total);
  Scalar worst = -std::numeric_limits<Scalar>::infinity();
  for (int i = 0; i < pairs; ++i) {
    Scalar a = u(rng);
    Scalar b = u(rng);
    if (a > b) std::swap(a, b);
    const ExcessResult e = excess(at(a), at(b));
    if (!e.exact) continue;
    worst = std::max(worst, (e.infinite ? std::numeric_limits<Scalar>::infinity() : e.value) - (b - a));
  }
  return worst;
}

const Reparametrization::Fill* Reparametrization::fill_containing(Scalar sigma) const {
  for (const auto& f : fills_) {
    if (sigma > f.sigma_from && sigma < f.sigma_to) return &f;
  }
  return nullptr;
}

ConvexSet Reparametrization::at(Scalar sigma) const {
  sigma = std::clamp<Scalar>(sigma, 0, arc_.total);
  if (const Fill* f = fill_containing(sigma)) {
    const Scalar u = (sigma - f->sigma_from) / (f->sigma_to - f->sigma_from);
    if (f->kind == FillKind::kGeodesic) return f->geodesic.at(u, true);
    const Ball a = *canonicalize(f->geodesic.from()).as<Ball>();
    const Ball b = *canonicalize(f->geodesic.to()).as<Ball>();
    return ConvexSet::ball(a.center + u * (b.center - a.center), a.radius + u * (b.radius - a.radius));
  }
  auto lo = std::lower_bound(entries_.begin(), entries_.end(), sigma,
                             [](const Entry& e, Scalar s) { return e.sigma < s; });
  auto hi = std::upper_bound(lo, entries_.end(), sigma, [](Scalar s, const Entry& e) { return s < e.sigma; });
  if (lo == hi) {
    // Strictly inside one sampling cell of a continuous piece.
    const Entry& b = *lo;
    const Entry& a = *std::prev(lo);
    const Scalar t = a.t + (sigma - a.sigma) / (b.sigma - a.sigma) * (b.t - a.t);
    return set_at(m_, t, Side::kAt);
  }
  const Scalar t_first = lo->t;
  const Scalar t_last = std::prev(hi)->t;
  if (t_first != t_last) return set_at(m_, t_first, Side::kRight);
  for (auto it = lo; it != hi; ++it) {
    if (it->side == Side::kAt) return set_at(m_, t_first, Side::kAt);
  }
  return set_at(m_, t_first, lo->side);
}

Scalar Reparametrization::to_time(Scalar sigma) const {
  sigma = std::clamp<Scalar>(sigma, 0, arc_.total);
  if (const Fill* f = fill_containing(sigma)) return f->t;
  auto lo = std::lower_bound(entries_.begin(), entries_.end(), sigma,
                             [](const Entry& e, Scalar s) { return e.sigma < s; });
  if (lo == entries_.end()) return entries_.back().t;
  if (lo->sigma == sigma || lo == entries_.begin()) return lo->t;
  const Entry& a = *std::prev(lo);
  return a.t + (sigma - a.sigma) / (lo->sigma - a.sigma) * (lo->t - a.t);
}

std::vector<Scalar> Reparametrization::plateau_times(Scalar sigma) const {
  auto lo = std::lower_bound(entries_.begin(), entries_.end(), sigma,
                             [](const Entry& e, Scalar s) { return e.sigma < s; });
  std::vector<Scalar> out;
  for (auto it = lo; it != entries_.end() && it->sigma == sigma; ++it) {
    if (out.empty() || out.back() != it->t) out.push_back(it->t);
  }
  if (out.size() < 2) out.clear();
  return out;
}

std::vector<Reparametrization::Piece> Reparametrization::pieces() const {
  std::vector<Piece> out;
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    const Entry& a = entries_[i - 1];
    const Entry& b = entries_[i];
    PieceKind kind;
    if (a.t == b.t) {
      if (a.sigma == b.sigma) continue;
      kind = b.side == Side::kAt ? PieceKind::kLeftFill : PieceKind::kRightFill;
    } else {
      kind = a.sigma == b.sigma ? PieceKind::kPlateau : PieceKind::kSegment;
    }
    const bool mergeable = kind == PieceKind::kSegment || kind == PieceKind::kPlateau;
    if (mergeable && !out.empty() && out.back().kind == kind && out.back().t_to == a.t) {
      out.back().sigma_to = b.sigma;
      out.back().t_to = b.t;
      continue;
    }
    out.push_back(Piece{kind, a.sigma, b.sigma, a.t, b.t});
  }
  return out;
}

Reparametrization reparametrize(const MovingSet& m, const ReparametrizeOptions& options) {
  return Reparametrization(m, options);
}

// ---------------------------------------------------------------------------
// Bounded-retraction solver

namespace {

/// y_hat' at sigma: slope of the cell ending at (or holding) sigma.
Vector arc_slope(const Trajectory& arc, Scalar sigma) {
  const auto& s = arc.times;
  if (s.size() < 2) return Vector::Zero(arc.dim());
  auto it = std::lower_bound(s.begin(), s.end(), sigma);
  auto j = static_cast<Eigen::Index>(std::distance(s.begin(), it));
  if (j >= arc.size()) j = arc.size() - 1;
  return arc.density.col(j);
}

bool plateau_interior(const Reparametrization& r, Scalar t, Scalar sigma) {
  const auto run = r.plateau_times(sigma);
  return !run.empty() && t != run.front() && std::binary_search(run.begin(), run.end(), t);
}

JumpRecord make_jump(const Reparametrization& r, const Trajectory& arc, const Jump& j) {
  const ArcLength& l = r.arc_length();
  JumpRecord rec;
  rec.t = j.t;
  rec.ell_left = l.left_limit(j.t);
  rec.ell_at = l.at(j.t);
  rec.ell_right = l.right_limit(j.t);
  rec.left = arc.value_at(rec.ell_left);
  rec.at = arc.value_at(rec.ell_at);
  rec.right = arc.value_at(rec.ell_right);
  const Scalar gap = rec.ell_right - rec.ell_left;
  rec.density = gap > 0 ? Vector((rec.right - rec.left) / gap) : Vector::Zero(rec.at.size());
  return rec;
}

}  // namespace

std::vector<DensitySample> density(const Reparametrization& r, const Trajectory& arc,
                                   const std::vector<Scalar>& times) {
  std::vector<DensitySample> out;
  out.reserve(times.size());
  for (Scalar t : times) {
    if (const Jump* j = r.moving_set().jump_at(t)) {
      const JumpRecord rec = make_jump(r, arc, *j);
      out.push_back({t, rec.density, true});
      continue;
    }
    const Scalar sigma = r.to_sigma(t);
    if (plateau_interior(r, t, sigma)) continue;
    out.push_back({t, arc_slope(arc, sigma), false});
  }
  return out;
}

BrSolution solve_br_full(const Reparametrization& r, const Vector& y0, const SolveOptions& options) {
  const MovingSet& m = r.moving_set();
  check_dim(m.dim(), y0.size(), "solve_br");
  const Vector start = project(set_at(m, 0, Side::kAt), y0);

  BrSolution sol;
  sol.arc = solve_lipschitz(r, start, options);
  sol.arc.ell = sol.arc.times;
  sol.arc.measure = DensityMeasure::kArcLength;
  sol.arc.initial_point = y0;
  sol.arc.initial_displacement = start - y0;

  // Output nodes: every arc-length node outside the fills, pulled back to t,
  // with whole plateaus and every jump time.
  std::vector<std::pair<Scalar, Scalar>> nodes;
  nodes.reserve(sol.arc.times.size() + m.jumps().size());
  for (Scalar sigma : sol.arc.times) {
    if (r.fill_containing(sigma) != nullptr) continue;
    const auto run = r.plateau_times(sigma);
    if (!run.empty()) {
      for (Scalar t : run) nodes.emplace_back(t, sigma);
    } else {
      nodes.emplace_back(r.to_time(sigma), sigma);
    }
  }
  for (const auto& j : m.jumps()) nodes.emplace_back(j.t, r.to_sigma(j.t));
  nodes.emplace_back(0.0, 0.0);
  nodes.emplace_back(m.horizon(), r.arc_length().total);
  std::stable_sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  nodes.erase(std::unique(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
              nodes.end());

  Trajectory& y = sol.trajectory;
  const auto count = static_cast<Eigen::Index>(nodes.size());
  y.times.reserve(nodes.size());
  y.ell.reserve(nodes.size());
  y.values.resize(m.dim(), count);
  y.density.resize(m.dim(), count);
  for (Eigen::Index k = 0; k < count; ++k) {
    const auto [t, sigma_hint] = nodes[static_cast<std::size_t>(k)];
    y.times.push_back(t);
    if (const Jump* j = m.jump_at(t)) {
      JumpRecord rec = make_jump(r, sol.arc, *j);
      rec.t = t;
      y.values.col(k) = rec.at;
      y.density.col(k) = rec.density;
      y.ell.push_back(rec.ell_at);
      y.jumps.push_back(std::move(rec));
      continue;
    }
    const Scalar sigma = sigma_hint;
    y.ell.push_back(sigma);
    y.values.col(k) = sol.arc.value_at(sigma);
    y.density.col(k) = plateau_interior(r, t, sigma) ? Vector::Zero(m.dim()) : arc_slope(sol.arc, sigma);
  }
  y.measure = DensityMeasure::kArcLength;
  y.initial_point = y0;
  y.initial_displacement = start - y0;
  y.stats = sol.arc.stats;
  return sol;
}

BrSolution solve_br_full(const MovingSet& m, const Vector& y0, const SolveOptions& options,
                         const ReparametrizeOptions& reparam) {
  return solve_br_full(Reparametrization(m, reparam), y0, options);
}

Trajectory solve_br(const MovingSet& m, const Vector& y0, const SolveOptions& options) {
  return solve_br_full(m, y0, options).trajectory;
}

}  // namespace sweep
