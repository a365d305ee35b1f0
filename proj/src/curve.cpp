#include "sweep/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sweep {

namespace {

Scalar horner(const std::vector<Scalar>& c, Scalar x) {
  Scalar acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

}  // namespace

ScalarCurve::ScalarCurve(Scalar constant) : pieces_{{-kInf, kInf, {constant}, false}} {
  if (!std::isfinite(constant)) throw InvalidInput("curve constant must be finite");
}

ScalarCurve ScalarCurve::polynomial(std::vector<Scalar> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  for (Scalar c : coeffs) {
    if (!std::isfinite(c)) throw InvalidInput("curve coefficient must be finite");
  }
  return ScalarCurve(std::vector<Piece>{{-kInf, kInf, std::move(coeffs), false}});
}

ScalarCurve ScalarCurve::piecewise(std::vector<Piece> pieces) {
  if (pieces.empty()) throw InvalidInput("piecewise curve needs at least one piece");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    auto& p = pieces[i];
    if (!(p.from < p.to)) throw InvalidInput("piecewise curve: piece " + std::to_string(i) + " has from >= to");
    if (i > 0 && pieces[i - 1].to != p.from) {
      throw InvalidInput("piecewise curve: pieces " + std::to_string(i - 1) + " and " + std::to_string(i) +
                         " are not contiguous");
    }
    if (p.coeffs.empty()) p.coeffs.push_back(0.0);
    for (Scalar c : p.coeffs) {
      if (!std::isfinite(c)) throw InvalidInput("curve coefficient must be finite");
    }
  }
  return ScalarCurve(std::move(pieces));
}

Scalar ScalarCurve::operator()(Scalar t) const {
  // Last piece whose start is <= t; times before the first piece use the first.
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                             [](Scalar v, const Piece& p) { return v < p.from; });
  const Piece& p = it == pieces_.begin() ? *it : *std::prev(it);
  const Scalar x = p.local && std::isfinite(p.from) ? t - p.from : t;
  return horner(p.coeffs, x);
}

VectorCurve VectorCurve::constant(const Vector& v) {
  std::vector<ScalarCurve> c;
  c.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) c.emplace_back(v[i]);
  return VectorCurve(std::move(c));
}

Vector VectorCurve::operator()(Scalar t) const {
  Vector out(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) out[i] = components_[static_cast<std::size_t>(i)](t);
  return out;
}

}  // namespace sweep
