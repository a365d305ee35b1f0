#include "sweep/moving_set.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sweep {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// Excess-level agreement of two sets that should coincide.
void require_agreement(const ConvexSet& a, const ConvexSet& b, const std::string& what) {
  const ExcessResult ab = excess(a, b);
  const ExcessResult ba = excess(b, a);
  if (!ab.exact || !ba.exact) return;
  if (ab.infinite || ba.infinite || ab.value > 1e-9 || ba.value > 1e-9) {
    throw InvalidInput(what);
  }
}

Scalar time_eps(Scalar horizon) { return 1e-12 * std::max<Scalar>(1, horizon); }

std::vector<Scalar> merged_nodes(const MovingSet& m, Scalar a, Scalar b, const std::vector<Scalar>& extra) {
  std::vector<Scalar> nodes{a, b};
  for (Scalar t : extra) {
    if (t > a && t < b) nodes.push_back(t);
  }
  for (Scalar t : m.breakpoints()) {
    if (t > a && t < b) nodes.push_back(t);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  // Snap nodes lying on a declared jump to its exact time.
  for (Scalar& t : nodes) {
    if (const Jump* j = m.jump_at(t)) t = j->t;
  }
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

/// Continuous-part excess e(C(s+), C(t-)) between adjacent nodes.
ExcessResult inner_excess(const MovingSet& m, Scalar s, Scalar t) {
  return excess(set_at(m, s, Side::kRight), set_at(m, t, Side::kLeft));
}

}  // namespace

ConvexSet evaluate(const SetFamily& family, Scalar t) {
  return std::visit(overloaded{
                        [&](const BallPath& p) { return ConvexSet::ball(p.center(t), p.radius(t)); },
                        [&](const BoxPath& p) { return ConvexSet::box(p.lo(t), p.hi(t)); },
                        [&](const HalfSpacePath& p) { return ConvexSet::halfspace(p.normal, p.offset(t)); },
                        [&](const AffinePath& p) { return ConvexSet::affine(p.point(t), p.basis); },
                        [&](const RigidPath& p) {
                          ConvexSet k = p.base;
                          if (p.shift) k = ConvexSet::translate(std::move(k), (*p.shift)(t));
                          if (p.grow) k = dilate(k, (*p.grow)(t));
                          return k;
                        },
                    },
                    family);
}

MovingSet::MovingSet(Scalar horizon, std::vector<Segment> segments, std::vector<JumpSpec> jumps)
    : horizon_(horizon), segments_(std::move(segments)) {
  if (!(horizon > 0) || !std::isfinite(horizon)) throw InvalidInput("moving set: horizon must be finite and > 0");
  if (segments_.empty()) throw InvalidInput("moving set: at least one segment is required");
  const Scalar eps = time_eps(horizon);
  if (std::abs(segments_.front().from) > eps) throw InvalidInput("moving set: first segment must start at 0");
  if (std::abs(segments_.back().to - horizon) > eps) throw InvalidInput("moving set: last segment must end at the horizon");
  segments_.front().from = 0;
  segments_.back().to = horizon;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    auto& s = segments_[i];
    const std::string tag = "moving set: segment " + std::to_string(i);
    if (!(s.from < s.to)) throw InvalidInput(tag + " has from >= to");
    if (i > 0) {
      if (std::abs(segments_[i - 1].to - s.from) > eps) throw InvalidInput(tag + " is not contiguous with its predecessor");
      s.from = segments_[i - 1].to;
    }
    if (!(s.lipschitz >= 0) || !std::isfinite(s.lipschitz)) throw InvalidInput(tag + ": lipschitz must be finite and >= 0");
    const ConvexSet first = evaluate(s.family, s.from);
    if (i == 0) dim_ = first.dim();
    check_dim(dim_, first.dim(), tag.c_str());
    check_dim(dim_, evaluate(s.family, s.to).dim(), tag.c_str());
  }

  // Spot-check the declared Lipschitz constants on deterministic random pairs.
  std::mt19937_64 rng(0x1b5);
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    std::uniform_real_distribution<Scalar> u(s.from, s.to);
    for (int k = 0; k < 16; ++k) {
      Scalar t0 = u(rng), t1 = u(rng);
      if (t0 > t1) std::swap(t0, t1);
      const ExcessResult e = excess(evaluate(s.family, t0), evaluate(s.family, t1));
      if (!e.exact) break;
      if (e.infinite || e.value > s.lipschitz * (t1 - t0) + 1e-9) {
        throw InvalidInput("moving set: segment " + std::to_string(i) + " violates its declared lipschitz constant " +
                           std::to_string(s.lipschitz) + " (e = " + std::to_string(e.value) + " over [" +
                           std::to_string(t0) + ", " + std::to_string(t1) + "])");
      }
    }
  }

  std::sort(jumps.begin(), jumps.end(), [](const JumpSpec& a, const JumpSpec& b) { return a.t < b.t; });
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    auto& spec = jumps[i];
    const std::string tag = "moving set: jump " + std::to_string(i);
    if (!(spec.t >= -eps && spec.t <= horizon + eps)) throw InvalidInput(tag + " lies outside [0, T]");
    spec.t = std::clamp<Scalar>(spec.t, 0, horizon);
    if (i > 0 && spec.t - jumps[i - 1].t <= eps) throw InvalidInput(tag + " repeats an earlier jump time");
    check_dim(dim_, spec.at.dim(), tag.c_str());

    ConvexSet left = spec.at;
    if (spec.t > 0) {
      const ConvexSet limit = family_at(spec.t, true);
      if (spec.left) {
        check_dim(dim_, spec.left->dim(), tag.c_str());
        require_agreement(*spec.left, limit, tag + ": left set disagrees with the segment limit");
        left = *spec.left;
      } else {
        left = limit;
      }
    }
    ConvexSet right = spec.at;
    if (spec.t < horizon) {
      const ConvexSet limit = family_at(spec.t, false);
      if (spec.right) {
        check_dim(dim_, spec.right->dim(), tag.c_str());
        require_agreement(*spec.right, limit, tag + ": right set disagrees with the segment value");
        right = *spec.right;
      } else {
        right = limit;
      }
    } else if (spec.right) {
      require_agreement(*spec.right, spec.at, tag + ": right set at the horizon must equal the set at T");
    }

    const ExcessResult lm = excess(left, spec.at);
    const ExcessResult rm = excess(spec.at, right);
    if (lm.infinite || rm.infinite) throw InvalidInput(tag + " has infinite excess");
    const bool exact = lm.exact && rm.exact;
    if (exact && lm.value == 0 && rm.value == 0) {
      throw InvalidInput(tag + " has zero excess on both sides; it is a continuity point, not a jump");
    }
    jumps_.push_back(Jump{spec.t, std::move(left), spec.at, std::move(right), lm.value, rm.value, exact});
  }

  // Joints without a declared jump must be continuous.
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    const Scalar t = segments_[i].from;
    if (jump_at(t) != nullptr) continue;
    require_agreement(evaluate(segments_[i - 1].family, t), evaluate(segments_[i].family, t),
                      "moving set: discontinuity at segment joint t = " + std::to_string(t) + " without a declared jump");
  }
}

Scalar MovingSet::max_lipschitz() const {
  Scalar l = 0;
  for (const auto& s : segments_) l = std::max(l, s.lipschitz);
  return l;
}

const Jump* MovingSet::jump_at(Scalar t) const {
  const Scalar eps = time_eps(horizon_);
  auto it = std::lower_bound(jumps_.begin(), jumps_.end(), t - eps, [](const Jump& j, Scalar v) { return j.t < v; });
  if (it != jumps_.end() && std::abs(it->t - t) <= eps) return &*it;
  return nullptr;
}

std::size_t MovingSet::segment_index(Scalar t) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](Scalar v, const Segment& s) { return v < s.from; });
  if (it == segments_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(segments_.begin(), it) - 1);
}

std::vector<Scalar> MovingSet::breakpoints() const {
  std::vector<Scalar> out;
  for (std::size_t i = 1; i < segments_.size(); ++i) out.push_back(segments_[i].from);
  for (const auto& j : jumps_) {
    if (j.t > 0 && j.t < horizon_) out.push_back(j.t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ConvexSet MovingSet::family_at(Scalar t, bool from_left) const {
  std::size_t i = segment_index(t);
  if (from_left && i > 0 && t <= segments_[i].from) --i;
  return evaluate(segments_[i].family, t);
}

ConvexSet set_at(const MovingSet& m, Scalar t, Side side) {
  const Scalar eps = time_eps(m.horizon());
  if (!(t >= -eps && t <= m.horizon() + eps)) {
    throw InvalidInput("set_at: t = " + std::to_string(t) + " outside [0, T]");
  }
  t = std::clamp<Scalar>(t, 0, m.horizon());
  if (const Jump* j = m.jump_at(t)) {
    switch (side) {
      case Side::kLeft:
        return j->left;
      case Side::kAt:
        return j->at;
      case Side::kRight:
        return j->right;
    }
  }
  return m.family_at(t, side == Side::kLeft);
}

Retraction retraction(const MovingSet& m, Scalar a, Scalar b, const std::vector<Scalar>& partition) {
  const Scalar eps = time_eps(m.horizon());
  if (!(a >= -eps && b <= m.horizon() + eps && a <= b)) throw InvalidInput("retraction: need 0 <= a <= b <= T");
  for (std::size_t i = 1; i < partition.size(); ++i) {
    if (!(partition[i - 1] < partition[i])) throw InvalidInput("retraction: partition must be increasing");
  }
  Retraction r;
  if (a == b) return r;
  const auto nodes = merged_nodes(m, std::max<Scalar>(a, 0), std::min(b, m.horizon()), partition);
  if (const Jump* j = m.jump_at(nodes.front())) {
    r.value += j->right_mass;
    r.upper += j->right_mass;
    r.exact = r.exact && j->exact;
  }
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const Scalar s = nodes[i - 1], t = nodes[i];
    const ExcessResult e = inner_excess(m, s, t);
    if (e.infinite) throw InvalidInput("retraction: infinite excess inside a segment");
    r.value += e.value;
    r.upper += std::max(e.value, m.segments()[m.segment_index(s)].lipschitz * (t - s));
    r.exact = r.exact && e.exact;
    if (const Jump* j = m.jump_at(t)) {
      const Scalar mass = j->left_mass + (i + 1 < nodes.size() ? j->right_mass : 0.0);
      r.value += mass;
      r.upper += mass;
      r.exact = r.exact && j->exact;
    }
  }
  return r;
}

ArcLength arc_length(const MovingSet& m, const std::vector<Scalar>& grid) {
  const Scalar eps = time_eps(m.horizon());
  for (Scalar t : grid) {
    if (!(t >= -eps && t <= m.horizon() + eps)) throw InvalidInput("arc_length: grid leaves [0, T]");
  }
  std::vector<Scalar> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  ArcLength out;
  out.grid = merged_nodes(m, 0, m.horizon(), sorted);
  out.values.assign(out.grid.size(), 0.0);

  std::vector<ConvexSet> left_sets, right_sets;
  left_sets.reserve(out.grid.size());
  right_sets.reserve(out.grid.size());
  for (Scalar t : out.grid) {
    if (m.jump_at(t) != nullptr) {
      left_sets.push_back(set_at(m, t, Side::kLeft));
      right_sets.push_back(set_at(m, t, Side::kRight));
    } else {
      ConvexSet c = set_at(m, t, Side::kAt);
      left_sets.push_back(c);
      right_sets.push_back(std::move(c));
    }
  }
  for (std::size_t i = 1; i < out.grid.size(); ++i) {
    Scalar inc = 0;
    if (const Jump* j = m.jump_at(out.grid[i - 1])) inc += j->right_mass;
    const ExcessResult e = excess(right_sets[i - 1], left_sets[i]);
    if (e.infinite) throw InvalidInput("arc_length: infinite excess inside a segment");
    out.exact = out.exact && e.exact;
    inc += e.value;
    if (const Jump* j = m.jump_at(out.grid[i])) inc += j->left_mass;
    out.values[i] = out.values[i - 1] + inc;
  }
  for (const auto& j : m.jumps()) {
    out.atoms.push_back({j.t, j.left_mass, j.right_mass});
    out.exact = out.exact && j.exact;
  }
  out.total = out.values.back();
  return out;
}

Scalar ArcLength::at(Scalar t) const {
  if (grid.empty()) return 0;
  if (t <= grid.front()) return values.front();
  if (t >= grid.back()) return values.back();
  auto it = std::lower_bound(grid.begin(), grid.end(), t);
  const auto i = static_cast<std::size_t>(std::distance(grid.begin(), it));
  if (grid[i] == t) return values[i];
  const Scalar w = (t - grid[i - 1]) / (grid[i] - grid[i - 1]);
  Scalar lo = values[i - 1];
  if (const JumpAtom* a = atom_at(grid[i - 1])) lo += a->right_mass;
  Scalar hi = values[i];
  if (const JumpAtom* a = atom_at(grid[i])) hi -= a->left_mass;
  return lo + w * (hi - lo);
}

const JumpAtom* ArcLength::atom_at(Scalar t) const {
  auto it = std::lower_bound(atoms.begin(), atoms.end(), t, [](const JumpAtom& a, Scalar v) { return a.t < v; });
  if (it != atoms.end() && it->t == t) return &*it;
  return nullptr;
}

Scalar ArcLength::left_limit(Scalar t) const {
  const JumpAtom* a = atom_at(t);
  return at(t) - (a != nullptr ? a->left_mass : 0.0);
}

Scalar ArcLength::right_limit(Scalar t) const {
  const JumpAtom* a = atom_at(t);
  return at(t) + (a != nullptr ? a->right_mass : 0.0);
}

std::vector<Scalar> uniform_grid(const MovingSet& m, Scalar per_unit) {
  std::vector<Scalar> cuts{0};
  for (Scalar t : m.breakpoints()) cuts.push_back(t);
  cuts.push_back(m.horizon());
  std::vector<Scalar> grid{0};
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const Scalar a = cuts[i - 1], b = cuts[i];
    const Scalar lip = m.segments()[m.segment_index(a)].lipschitz;
    const auto count = static_cast<long>(std::max<Scalar>(8, std::ceil((b - a) * std::max<Scalar>(1, lip) * per_unit)));
    for (long k = 1; k < count; ++k) grid.push_back(a + (b - a) * static_cast<Scalar>(k) / static_cast<Scalar>(count));
    grid.push_back(b);
  }
  return grid;
}

std::vector<JumpAtom> jump_times(const MovingSet& m) {
  std::vector<JumpAtom> out;
  for (const auto& j : m.jumps()) out.push_back({j.t, j.left_mass, j.right_mass});
  return out;
}

}  // namespace sweep
