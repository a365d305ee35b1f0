#include "sweep/convex_set.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sweep {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw InvalidInput(std::string(what) + ": non-finite entry");
}

bool same_vector(const Vector& a, const Vector& b) { return a.size() == b.size() && a == b; }

bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

Vector dykstra(const Intersection& s, const Vector& x) {
  bool inside = true;
  for (const auto& m : s.members) {
    if (!contains(m, x, 0.0)) {
      inside = false;
      break;
    }
  }
  if (inside) return x;

  const std::size_t m = s.members.size();
  const Eigen::Index n = x.size();
  std::vector<Vector> corrections(m, Vector::Zero(n));
  Vector y = x;
  Vector z(n);
  Vector before(n);
  for (long iter = 0; iter < s.options.max_iter; ++iter) {
    before = y;
    for (std::size_t i = 0; i < m; ++i) {
      z = y + corrections[i];
      project_into(s.members[i], z, y);
      corrections[i] = z - y;
    }
    if ((y - before).norm() <= s.options.tol * (1.0 + y.norm())) {
      Scalar worst = 0;
      for (const auto& member : s.members) worst = std::max(worst, distance(member, y));
      if (worst <= 10.0 * s.options.tol * (1.0 + y.norm())) return y;
    }
  }
  throw ProjectionError("intersection projection: Dykstra iteration did not converge within " +
                        std::to_string(s.options.max_iter) + " sweeps");
}

bool contains_intersection(const ConvexSet& k) {
  return std::visit(overloaded{
                        [](const Translate& t) { return contains_intersection(*t.base); },
                        [](const Dilation& d) { return contains_intersection(*d.base); },
                        [](const Intersection&) { return true; },
                        [](const auto&) { return false; },
                    },
                    k.shape());
}

/// Splits a canonical set into (primitive core, total dilation radius).
std::pair<ConvexSet, Scalar> peel_dilation(const ConvexSet& k) {
  if (const auto* d = k.as<Dilation>()) return {*d->base, d->radius};
  if (const auto* b = k.as<Ball>()) return {ConvexSet::point(b->center), b->radius};
  return {k, 0.0};
}

bool is_whole_space(const ConvexSet& k) {
  const auto* a = k.as<AffineSubspace>();
  return a != nullptr && a->basis.cols() == k.dim();
}

ExcessResult monte_carlo_excess(const ConvexSet& a, const ConvexSet& b, const ExcessOptions& opt) {
  if (!a.is_bounded()) return {kInf, true, false};
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<Scalar> normal(0.0, 1.0);
  const Eigen::Index n = a.dim();
  const Vector anchor = project(a, Vector::Zero(n));
  Scalar width = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector e = Vector::Unit(n, i);
    const Scalar hi = support(a, e).value;
    e[i] = -1;
    width = std::max(width, hi + support(a, e).value);
  }
  const Scalar reach = 10.0 * (1.0 + width);
  Scalar best = distance(b, anchor);
  Vector u(n);
  for (int s = 0; s < opt.samples; ++s) {
    for (Eigen::Index i = 0; i < n; ++i) u[i] = normal(rng);
    const Scalar len = u.norm();
    if (len == 0) continue;
    const Vector p = project(a, anchor + (reach / len) * u);
    best = std::max(best, distance(b, p));
  }
  return {best, false, false};
}

/// Excess for an unbounded canonical A; only the combinations with a closed
/// form are answered, the rest come back infinite and inexact.
ExcessResult unbounded_excess(const ConvexSet& a, const ConvexSet& b) {
  if (const auto* h = b.as<HalfSpace>()) {
    const SupportValue s = support(a, -h->normal);
    if (!s.exact) return {kInf, true, false};
    if (s.infinite) return {kInf, true, true};
    return {std::max<Scalar>(0, h->offset + s.value), false, true};
  }
  if (const auto* bf = b.as<AffineSubspace>()) {
    auto [core, r] = peel_dilation(a);
    if (const auto* af = core.as<AffineSubspace>()) {
      const Matrix residual = af->basis - bf->basis * (bf->basis.transpose() * af->basis);
      if (residual.size() > 0 && residual.norm() > 1e-12) return {kInf, true, true};
      return {distance(b, af->point) + r, false, true};
    }
    if (core.as<HalfSpace>() != nullptr) return {kInf, true, true};
    return {kInf, true, false};
  }
  if (b.is_bounded()) return {kInf, true, true};
  return {kInf, true, false};
}

}  // namespace

ConvexSet::ConvexSet(Shape shape, Eigen::Index dim)
    : shape_(std::make_shared<const Shape>(std::move(shape))), dim_(dim) {}

ConvexSet ConvexSet::ball(Vector center, Scalar radius) {
  require_finite(center, "ball center");
  if (!(radius >= 0) || !std::isfinite(radius)) throw InvalidInput("ball radius must be finite and >= 0");
  const Eigen::Index n = center.size();
  return ConvexSet(Ball{std::move(center), radius}, n);
}

ConvexSet ConvexSet::box(Vector lo, Vector hi) {
  check_dim(lo.size(), hi.size(), "box");
  require_finite(lo, "box lo");
  require_finite(hi, "box hi");
  if ((lo.array() > hi.array()).any()) throw InvalidInput("box requires lo <= hi componentwise");
  const Eigen::Index n = lo.size();
  return ConvexSet(Box{std::move(lo), std::move(hi)}, n);
}

ConvexSet ConvexSet::halfspace(Vector normal, Scalar offset) {
  require_finite(normal, "halfspace normal");
  const Scalar len = normal.norm();
  if (!(len > 0)) throw InvalidInput("halfspace normal must be nonzero");
  if (!std::isfinite(offset)) throw InvalidInput("halfspace offset must be finite");
  const Eigen::Index n = normal.size();
  return ConvexSet(HalfSpace{normal / len, offset / len}, n);
}

ConvexSet ConvexSet::affine(Vector point, Matrix basis) {
  require_finite(point, "affine point");
  const Eigen::Index n = point.size();
  if (basis.cols() == 0) return ConvexSet(AffineSubspace{std::move(point), Matrix(n, 0)}, n);
  check_dim(n, basis.rows(), "affine basis");
  if (!basis.allFinite()) throw InvalidInput("affine basis: non-finite entry");
  const Eigen::Index m = basis.cols();
  if ((basis.transpose() * basis - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-14) {
    return ConvexSet(AffineSubspace{std::move(point), std::move(basis)}, n);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(basis);
  if (qr.rank() != basis.cols()) throw InvalidInput("affine basis columns must be linearly independent");
  Eigen::HouseholderQR<Matrix> hqr(basis);
  Matrix q = hqr.householderQ() * Matrix::Identity(n, basis.cols());
  return ConvexSet(AffineSubspace{std::move(point), std::move(q)}, n);
}

ConvexSet ConvexSet::point(Vector p) { return ball(std::move(p), 0.0); }

ConvexSet ConvexSet::translate(ConvexSet base, Vector offset) {
  check_dim(base.dim(), offset.size(), "translate");
  require_finite(offset, "translate offset");
  const Eigen::Index n = base.dim();
  return ConvexSet(Translate{std::make_shared<const ConvexSet>(std::move(base)), std::move(offset)}, n);
}

ConvexSet ConvexSet::dilation(ConvexSet base, Scalar radius) {
  if (!(radius >= 0) || !std::isfinite(radius)) throw InvalidInput("dilation radius must be finite and >= 0");
  const Eigen::Index n = base.dim();
  return ConvexSet(Dilation{std::make_shared<const ConvexSet>(std::move(base)), radius}, n);
}

ConvexSet ConvexSet::intersection(std::vector<ConvexSet> members, Vector witness, DykstraOptions options) {
  if (members.empty()) throw InvalidInput("intersection needs at least one member");
  const Eigen::Index n = members.front().dim();
  for (const auto& m : members) check_dim(n, m.dim(), "intersection member");
  check_dim(n, witness.size(), "intersection witness");
  if (!(options.tol > 0) || options.max_iter <= 0) throw InvalidInput("intersection: invalid Dykstra options");
  const Scalar tol = std::max(kDefaultTol, 10 * options.tol) * (1.0 + witness.norm());
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!contains(members[i], witness, tol)) {
      throw InvalidInput("intersection witness is not in member " + std::to_string(i));
    }
  }
  return ConvexSet(Intersection{std::move(members), std::move(witness), options}, n);
}

bool ConvexSet::is_bounded() const {
  return std::visit(
      overloaded{
          [](const Ball&) { return true; },
          [](const Box&) { return true; },
          [](const HalfSpace&) { return false; },
          [](const AffineSubspace& a) { return a.basis.cols() == 0; },
          [](const Translate& t) { return t.base->is_bounded(); },
          [](const Dilation& d) { return d.base->is_bounded(); },
          [this](const Intersection& s) {
            for (const auto& m : s.members) {
              if (m.is_bounded()) return true;
            }
            // Sufficient test: every axis direction is capped by some member.
            for (Eigen::Index i = 0; i < dim_; ++i) {
              for (const Scalar sign : {1.0, -1.0}) {
                const Vector e = sign * Vector::Unit(dim_, i);
                bool capped = false;
                for (const auto& m : s.members) {
                  if (!support(m, e).infinite) {
                    capped = true;
                    break;
                  }
                }
                if (!capped) return false;
              }
            }
            return true;
          },
      },
      *shape_);
}

bool operator==(const ConvexSet& a, const ConvexSet& b) {
  if (a.shape_ == b.shape_) return true;
  if (a.dim() != b.dim() || a.shape().index() != b.shape().index()) return false;
  return std::visit(
      overloaded{
          [&](const Ball& x) {
            const auto& y = *b.as<Ball>();
            return x.radius == y.radius && same_vector(x.center, y.center);
          },
          [&](const Box& x) {
            const auto& y = *b.as<Box>();
            return same_vector(x.lo, y.lo) && same_vector(x.hi, y.hi);
          },
          [&](const HalfSpace& x) {
            const auto& y = *b.as<HalfSpace>();
            return x.offset == y.offset && same_vector(x.normal, y.normal);
          },
          [&](const AffineSubspace& x) {
            const auto& y = *b.as<AffineSubspace>();
            return same_vector(x.point, y.point) && same_matrix(x.basis, y.basis);
          },
          [&](const Translate& x) {
            const auto& y = *b.as<Translate>();
            return same_vector(x.offset, y.offset) && *x.base == *y.base;
          },
          [&](const Dilation& x) {
            const auto& y = *b.as<Dilation>();
            return x.radius == y.radius && *x.base == *y.base;
          },
          [&](const Intersection& x) {
            const auto& y = *b.as<Intersection>();
            if (x.members.size() != y.members.size()) return false;
            for (std::size_t i = 0; i < x.members.size(); ++i) {
              if (!(x.members[i] == y.members[i])) return false;
            }
            return true;
          },
      },
      a.shape());
}

void project_into(const ConvexSet& k, const Vector& x, Vector& out) {
  check_dim(k.dim(), x.size(), "project");
  out.resize(x.size());
  std::visit(overloaded{
                 [&](const Ball& b) {
                   const Scalar len = (x - b.center).norm();
                   if (len <= b.radius) {
                     out = x;
                   } else {
                     out = b.center + (b.radius / len) * (x - b.center);
                   }
                 },
                 [&](const Box& b) { out = x.cwiseMax(b.lo).cwiseMin(b.hi); },
                 [&](const HalfSpace& h) {
                   const Scalar gap = h.offset - h.normal.dot(x);
                   if (gap <= 0) {
                     out = x;
                   } else {
                     out = x + gap * h.normal;
                   }
                 },
                 [&](const AffineSubspace& a) {
                   if (a.basis.cols() == 0) {
                     out = a.point;
                     return;
                   }
                   const Vector coords = a.basis.transpose() * (x - a.point);
                   out = a.point;
                   out.noalias() += a.basis * coords;
                 },
                 [&](const Translate& t) {
                   out = x - t.offset;
                   project_into(*t.base, out, out);
                   out += t.offset;
                 },
                 [&](const Dilation& d) {
                   Vector y;
                   project_into(*d.base, x, y);
                   const Scalar gap = (x - y).norm();
                   if (gap <= d.radius) {
                     out = x;
                   } else {
                     out = y + (d.radius / gap) * (x - y);
                   }
                 },
                 [&](const Intersection& s) { out = dykstra(s, x); },
             },
             k.shape());
}

Vector project(const ConvexSet& k, const Vector& x) {
  Vector out(x.size());
  project_into(k, x, out);
  return out;
}

Scalar distance(const ConvexSet& k, const Vector& x) { return (x - project(k, x)).norm(); }

bool contains(const ConvexSet& k, const Vector& x, Scalar tol) {
  if (const auto* s = k.as<Intersection>()) {
    check_dim(k.dim(), x.size(), "contains");
    for (const auto& m : s->members) {
      if (!contains(m, x, tol)) return false;
    }
    return true;
  }
  return distance(k, x) <= tol;
}

SupportValue support(const ConvexSet& k, const Vector& u) {
  check_dim(k.dim(), u.size(), "support");
  const Scalar ulen = u.norm();
  return std::visit(
      overloaded{
          [&](const Ball& b) { return SupportValue{u.dot(b.center) + b.radius * ulen}; },
          [&](const Box& b) {
            return SupportValue{u.cwiseProduct(b.lo).cwiseMax(u.cwiseProduct(b.hi)).sum()};
          },
          [&](const HalfSpace& h) {
            if (ulen == 0) return SupportValue{0};
            const Scalar along = u.dot(h.normal);
            const Scalar off = (u - along * h.normal).norm();
            if (along <= 0 && off <= 1e-12 * ulen) return SupportValue{along * h.offset};
            return SupportValue{kInf, true};
          },
          [&](const AffineSubspace& a) {
            if (a.basis.cols() > 0 && (a.basis.transpose() * u).norm() > 1e-12 * ulen) {
              return SupportValue{kInf, true};
            }
            return SupportValue{u.dot(a.point)};
          },
          [&](const Translate& t) {
            SupportValue s = support(*t.base, u);
            if (!s.infinite) s.value += u.dot(t.offset);
            return s;
          },
          [&](const Dilation& d) {
            SupportValue s = support(*d.base, u);
            if (!s.infinite) s.value += d.radius * ulen;
            return s;
          },
          [&](const Intersection& s) {
            SupportValue best{kInf, true, s.members.size() == 1};
            for (const auto& m : s.members) {
              const SupportValue v = support(m, u);
              if (!v.infinite && (best.infinite || v.value < best.value)) {
                best.value = v.value;
                best.infinite = false;
              }
            }
            return best;
          },
      },
      k.shape());
}

Scalar signed_distance(const ConvexSet& k, const Vector& x) {
  check_dim(k.dim(), x.size(), "signed_distance");
  return std::visit(
      overloaded{
          [&](const Ball& b) { return (x - b.center).norm() - b.radius; },
          [&](const Box& b) -> Scalar {
            if ((x.array() < b.lo.array()).any() || (x.array() > b.hi.array()).any()) return distance(k, x);
            return -(x - b.lo).cwiseMin(b.hi - x).minCoeff();
          },
          [&](const HalfSpace& h) { return h.offset - h.normal.dot(x); },
          [&](const AffineSubspace& a) -> Scalar {
            if (a.basis.cols() == k.dim()) return -kInf;
            return distance(k, x);
          },
          [&](const Translate& t) { return signed_distance(*t.base, x - t.offset); },
          [&](const Dilation& d) { return signed_distance(*d.base, x) - d.radius; },
          [&](const Intersection& s) -> Scalar {
            Scalar worst = -kInf;
            for (const auto& m : s.members) worst = std::max(worst, signed_distance(m, x));
            if (worst <= 0) return worst;
            return distance(k, x);
          },
      },
      k.shape());
}

ConvexSet canonicalize(const ConvexSet& k) {
  return std::visit(
      overloaded{
          [&](const Translate& t) -> ConvexSet {
            const ConvexSet base = canonicalize(*t.base);
            const Vector& a = t.offset;
            return std::visit(
                overloaded{
                    [&](const Ball& b) { return ConvexSet::ball(b.center + a, b.radius); },
                    [&](const Box& b) { return ConvexSet::box(b.lo + a, b.hi + a); },
                    [&](const HalfSpace& h) { return ConvexSet::halfspace(h.normal, h.offset + h.normal.dot(a)); },
                    [&](const AffineSubspace& f) { return ConvexSet::affine(f.point + a, f.basis); },
                    [&](const Dilation& d) {
                      return ConvexSet::dilation(canonicalize(ConvexSet::translate(*d.base, a)), d.radius);
                    },
                    [&](const Intersection& s) {
                      std::vector<ConvexSet> moved;
                      moved.reserve(s.members.size());
                      for (const auto& m : s.members) moved.push_back(canonicalize(ConvexSet::translate(m, a)));
                      return ConvexSet::intersection(std::move(moved), s.witness + a, s.options);
                    },
                    [&](const Translate&) -> ConvexSet { throw Error("canonicalize: nested translate survived"); },
                },
                base.shape());
          },
          [&](const Dilation& d) -> ConvexSet {
            const ConvexSet base = canonicalize(*d.base);
            if (d.radius == 0) return base;
            if (const auto* b = base.as<Ball>()) return ConvexSet::ball(b->center, b->radius + d.radius);
            if (const auto* inner = base.as<Dilation>()) return ConvexSet::dilation(*inner->base, inner->radius + d.radius);
            if (const auto* h = base.as<HalfSpace>()) return ConvexSet::halfspace(h->normal, h->offset - d.radius);
            if (is_whole_space(base)) return base;
            return ConvexSet::dilation(base, d.radius);
          },
          [&](const Intersection& s) -> ConvexSet {
            std::vector<ConvexSet> members;
            members.reserve(s.members.size());
            for (const auto& m : s.members) members.push_back(canonicalize(m));
            return ConvexSet::intersection(std::move(members), s.witness, s.options);
          },
          [&](const auto&) -> ConvexSet { return k; },
      },
      k.shape());
}

ConvexSet dilate(const ConvexSet& k, Scalar r) {
  if (!(r >= 0) || !std::isfinite(r)) throw InvalidInput("dilate: radius must be finite and >= 0");
  if (r == 0) return k;
  if (const auto* b = k.as<Ball>()) return ConvexSet::ball(b->center, b->radius + r);
  if (const auto* d = k.as<Dilation>()) return ConvexSet::dilation(*d->base, d->radius + r);
  return ConvexSet::dilation(k, r);
}

namespace {

/// k = (base + shift) + D_radius after stripping outer translates and dilations.
struct Rigid {
  ConvexSet base;
  Vector shift;
  Scalar radius;
};

Rigid peel_rigid(const ConvexSet& k) {
  Rigid r{k, Vector::Zero(k.dim()), 0};
  for (;;) {
    if (const auto* t = r.base.as<Translate>()) {
      r.shift += t->offset;
      r.base = *t->base;
    } else if (const auto* d = r.base.as<Dilation>()) {
      r.radius += d->radius;
      r.base = *d->base;
    } else {
      return r;
    }
  }
}

}  // namespace

ExcessResult excess(const ConvexSet& a, const ConvexSet& b, const ExcessOptions& options) {
  check_dim(a.dim(), b.dim(), "excess");
  if (a == b) return {0, false, true};
  if (options.method == ExcessMethod::kMonteCarlo) return monte_carlo_excess(a, b, options);

  // Moved copies of one bounded base: the support point in the direction of the shift attains |shift|.
  if (options.method == ExcessMethod::kAuto || options.method == ExcessMethod::kClosedForm) {
    const Rigid ra = peel_rigid(a);
    const Rigid rb = peel_rigid(b);
    if (ra.base == rb.base && ra.base.is_bounded()) {
      return {std::max<Scalar>(0, (ra.shift - rb.shift).norm() + ra.radius - rb.radius), false, true};
    }
  }

  const ConvexSet ac = canonicalize(a);
  const ConvexSet bc = canonicalize(b);
  if (ac == bc || is_whole_space(bc)) return {0, false, true};

  if (!ac.is_bounded()) {
    if (options.method == ExcessMethod::kVertexEnum) throw InvalidInput("excess: vertex enumeration needs a bounded set");
    return unbounded_excess(ac, bc);
  }

  auto [core, radius] = peel_dilation(ac);
  if (const auto* p = core.as<Ball>(); p != nullptr && p->radius == 0) {
    if (options.method == ExcessMethod::kVertexEnum) throw InvalidInput("excess: no vertex set for a ball");
    return {std::max<Scalar>(0, signed_distance(bc, p->center) + radius), false, true};
  }
  if (const auto* f = core.as<AffineSubspace>(); f != nullptr && f->basis.cols() == 0) {
    return {std::max<Scalar>(0, signed_distance(bc, f->point) + radius), false, true};
  }
  if (options.method == ExcessMethod::kClosedForm) throw InvalidInput("excess: no closed form for this pair");

  if (const auto* box = core.as<Box>(); box != nullptr && core.dim() <= 20) {
    // The signed distance to a convex set is convex, so its max over a box sits at a vertex.
    const Eigen::Index n = core.dim();
    Scalar best = -kInf;
    Vector v(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      for (Eigen::Index i = 0; i < n; ++i) v[i] = (mask >> i) & 1U ? box->hi[i] : box->lo[i];
      best = std::max(best, signed_distance(bc, v));
    }
    return {std::max<Scalar>(0, best + radius), false, true};
  }
  if (options.method == ExcessMethod::kVertexEnum) throw InvalidInput("excess: vertex enumeration unavailable");
  return monte_carlo_excess(a, b, options);
}

bool in_normal_cone(const ConvexSet& k, const Vector& x, const Vector& u, Scalar tol) {
  check_dim(k.dim(), u.size(), "in_normal_cone");
  const Vector y = project(k, x);
  if ((x - y).norm() > tol) throw InvalidInput("in_normal_cone: point is not in the set");
  const Scalar ulen = u.norm();
  if (ulen == 0) return true;
  const SupportValue s = support(k, u);
  if (s.exact) return !s.infinite && s.value <= u.dot(x) + tol;
  // Intersections: u is normal at y iff y is its own projection after a step along u.
  return (project(k, y + u / ulen) - y).norm() <= tol;
}

}  // namespace sweep
