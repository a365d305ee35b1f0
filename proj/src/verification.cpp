#include "sweep/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sweep {

namespace {

CheckReport report(std::string name, Scalar tol) {
  CheckReport r;
  r.name = std::move(name);
  r.tolerance = tol;
  return r;
}

void record(CheckReport& r, Scalar residual, Scalar location) {
  if (std::isnan(residual)) residual = std::numeric_limits<Scalar>::infinity();
  if (residual > r.residual) {
    r.residual = residual;
    r.location = location;
  }
}

void finish(CheckReport& r) { r.passed = r.residual <= r.tolerance; }

Vector left_value(const Trajectory& y, Eigen::Index j) {
  if (const JumpRecord* rec = y.jump_at(y.times[static_cast<std::size_t>(j)])) return rec->left;
  return y.values.col(j);
}

Vector right_value(const Trajectory& y, Eigen::Index j) {
  if (const JumpRecord* rec = y.jump_at(y.times[static_cast<std::size_t>(j)])) return rec->right;
  return y.values.col(j);
}

}  // namespace

CheckReport check_constraint(const Trajectory& y, const MovingSet& m, Scalar tol) {
  check_dim(m.dim(), y.dim(), "check_constraint");
  CheckReport r = report("constraint", tol);
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    const Scalar t = y.times[static_cast<std::size_t>(j)];
    record(r, distance(set_at(m, t, Side::kAt), y.values.col(j)), t);
    if (const JumpRecord* rec = y.jump_at(t)) {
      record(r, distance(set_at(m, t, Side::kLeft), rec->left), t);
      record(r, distance(set_at(m, t, Side::kRight), rec->right), t);
    }
  }
  finish(r);
  return r;
}

CheckReport check_jump_conditions(const Trajectory& y, const MovingSet& m, Scalar tol) {
  check_dim(m.dim(), y.dim(), "check_jump_conditions");
  CheckReport r = report("jump_conditions", tol);
  for (const Jump& j : m.jumps()) {
    const JumpRecord* rec = y.jump_at(j.t);
    if (rec == nullptr) {
      record(r, std::numeric_limits<Scalar>::infinity(), j.t);
      r.detail = "no trajectory record at a declared jump";
      continue;
    }
    record(r, (rec->at - project(j.at, rec->left)).norm(), j.t);
    record(r, (rec->right - project(j.right, rec->at)).norm(), j.t);
  }
  if (m.jumps().empty()) r.detail = "no jumps";
  finish(r);
  return r;
}

CheckReport check_contraction(const DiscreteTrajectory& y, const DiscreteTrajectory& z, Scalar tol) {
  if (y.times != z.times || y.points.rows() != z.points.rows()) {
    throw InvalidInput("check_contraction: trajectories live on different grids");
  }
  CheckReport r = report("contraction", tol);
  Scalar prev = (y.points.col(0) - z.points.col(0)).norm();
  for (Eigen::Index j = 1; j < y.size(); ++j) {
    const Scalar d = (y.points.col(j) - z.points.col(j)).norm();
    record(r, d - prev, static_cast<Scalar>(j));
    prev = d;
  }
  finish(r);
  return r;
}

CheckReport check_projection_estimate(const ConvexSet& a, const ConvexSet& b, const Vector& x, const Vector& y,
                                      Scalar tol) {
  const ExcessResult eab = excess(a, b);
  const ExcessResult eba = excess(b, a);
  if (!eab.exact || !eba.exact) throw InexactExcessError("check_projection_estimate: inexact excess");
  CheckReport r = report("projection_estimate", tol);
  const Scalar lhs = (project(a, x) - project(b, y)).squaredNorm() - (x - y).squaredNorm();
  const Scalar dxa = distance(a, x);
  const Scalar dyb = distance(b, y);
  // 0 * inf counts as 0: a point inside its set contributes nothing.
  const Scalar t1 = dxa == 0 ? 0 : (eba.infinite ? std::numeric_limits<Scalar>::infinity() : 2 * dxa * eba.value);
  const Scalar t2 = dyb == 0 ? 0 : (eab.infinite ? std::numeric_limits<Scalar>::infinity() : 2 * dyb * eab.value);
  r.residual = lhs - (t1 + t2);
  r.passed = r.residual <= tol;
  return r;
}

std::vector<Scalar> integral_inequalities(const Trajectory& y, const MovingSet& m, const std::vector<Vector>& probes,
                                          bool flip) {
  for (const Vector& w : probes) check_dim(m.dim(), w.size(), "integral_inequality");
  const std::size_t k = probes.size();
  std::vector<Scalar> totals(k, 0.0);
  if (k == 0 || y.size() == 0) return totals;
  std::vector<Vector> z_prev(k), z(k);
  {
    const ConvexSet c = set_at(m, y.times[0], Side::kAt);
    for (std::size_t i = 0; i < k; ++i) project_into(c, probes[i], z_prev[i]);
  }
  Vector slope(y.dim());
  for (Eigen::Index j = 1; j < y.size(); ++j) {
    const Scalar t0 = y.times[static_cast<std::size_t>(j - 1)];
    const Scalar t1 = y.times[static_cast<std::size_t>(j)];
    const ConvexSet c = set_at(m, t1, Side::kAt);
    const Scalar dt = t1 - t0;
    if (dt > 0) slope = (y.values.col(j) - y.values.col(j - 1)) / dt;
    for (std::size_t i = 0; i < k; ++i) {
      project_into(c, probes[i], z[i]);
      if (dt > 0) {
        const Scalar f0 = (y.values.col(j - 1) - z_prev[i]).dot(slope);
        const Scalar f1 = (y.values.col(j) - z[i]).dot(slope);
        totals[i] += 0.5 * dt * (f0 + f1);
      }
      std::swap(z_prev[i], z[i]);
    }
  }
  if (flip) {
    for (Scalar& v : totals) v = -v;
  }
  return totals;
}

Scalar integral_inequality(const Trajectory& y, const MovingSet& m, const Vector& w, bool flip) {
  return integral_inequalities(y, m, {w}, flip).front();
}

CheckReport check_integral_inequality(const Trajectory& y, const MovingSet& m, const std::vector<Vector>& probes,
                                      Scalar tol) {
  if (m.has_jumps()) throw InvalidInput("check_integral_inequality: moving set has jumps");
  CheckReport r = report("integral_inequality", tol * (1 + m.horizon()));
  r.residual = -std::numeric_limits<Scalar>::infinity();
  const std::vector<Scalar> values = integral_inequalities(y, m, probes);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Scalar value = values[i];
    if (value > r.residual) {
      r.residual = value;
      r.location = static_cast<Scalar>(i);
    }
  }
  if (probes.empty()) {
    r.residual = 0;
    r.detail = "no probes";
  }
  finish(r);
  return r;
}

Scalar variation(const Trajectory& y, Scalar a, Scalar b) {
  Scalar total = 0;
  const auto n = y.size();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Scalar t = y.times[static_cast<std::size_t>(j)];
    if (t < a || t > b) continue;
    if (const JumpRecord* rec = y.jump_at(t)) {
      if (t > a) total += (rec->at - rec->left).norm();
      if (t < b) total += (rec->right - rec->at).norm();
    }
    if (j > 0 && y.times[static_cast<std::size_t>(j - 1)] >= a) {
      total += (left_value(y, j) - right_value(y, j - 1)).norm();
    }
  }
  return total;
}

Scalar variation(const Trajectory& y) {
  if (y.times.empty()) return 0;
  return variation(y, y.times.front(), y.times.back());
}

Scalar variation(const DiscreteTrajectory& y, Scalar a, Scalar b) {
  Scalar total = 0;
  for (Eigen::Index j = 1; j < y.size(); ++j) {
    if (y.times[static_cast<std::size_t>(j - 1)] < a || y.times[static_cast<std::size_t>(j)] > b) continue;
    total += (y.points.col(j) - y.points.col(j - 1)).norm();
  }
  return total;
}

Scalar variation(const DiscreteTrajectory& y) {
  if (y.times.empty()) return 0;
  return variation(y, y.times.front(), y.times.back());
}

CheckReport check_normal_cone_residuals(const Trajectory& y, const MovingSet& m, Scalar tol) {
  check_dim(m.dim(), y.dim(), "check_normal_cone_residuals");
  CheckReport r = report("normal_cone", tol);
  for (Eigen::Index j = 1; j < y.size(); ++j) {
    const Scalar t = y.times[static_cast<std::size_t>(j)];
    if (y.jump_at(t) != nullptr) continue;
    const Vector u = -y.density.col(j);
    const Scalar ulen = u.norm();
    if (ulen <= tol) continue;
    const ConvexSet k = set_at(m, t, Side::kAt);
    const Vector x = y.values.col(j);
    const Scalar scale = 1 + ulen;
    const Vector p = project(k, x);
    const Scalar dist = (x - p).norm();
    if (dist > tol * scale) {
      record(r, dist / scale, t);
      continue;
    }
    Scalar residual;
    const SupportValue s = support(k, u);
    if (s.exact) {
      residual = s.infinite ? std::numeric_limits<Scalar>::infinity() : std::max<Scalar>(0, s.value - u.dot(x));
    } else {
      residual = (project(k, p + u / ulen) - p).norm();
    }
    record(r, residual / scale, t);
  }
  finish(r);
  return r;
}

}  // namespace sweep
