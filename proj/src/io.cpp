#include "sweep/io.hpp"

#include <charconv>
#include <random>
#include <fstream>
#include <sstream>
#include <system_error>

namespace sweep {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

const Json& field(const Json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) throw ParseError(path.empty() ? "/" : path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(child(path, key), "missing field");
  return *it;
}

const Json* optional_field(const Json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

Scalar number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  return j.get<Scalar>();
}

std::string text(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path, "expected a string");
  return j.get<std::string>();
}

Matrix parse_columns(const Json& j, const std::string& path, Eigen::Index dim) {
  if (!j.is_array()) throw ParseError(path, "expected an array of column vectors");
  Matrix basis(dim, static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vector col = parse_vector(j[i], child(path, i));
    if (col.size() != dim) throw ParseError(child(path, i), "column dimension does not match the point");
    basis.col(static_cast<Eigen::Index>(i)) = col;
  }
  return basis;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

std::vector<Scalar> coefficients(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ParseError(path, "expected a nonempty coefficient array");
  std::vector<Scalar> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], child(path, i)));
  return out;
}

SetFamily parse_family(const std::string& shape, const Json& params, const std::string& path) {
  if (shape == "ball") {
    return BallPath{parse_vector_curve(field(params, path, "center"), child(path, "center")),
                    parse_scalar_curve(field(params, path, "radius"), child(path, "radius"))};
  }
  if (shape == "box") {
    return BoxPath{parse_vector_curve(field(params, path, "lo"), child(path, "lo")),
                   parse_vector_curve(field(params, path, "hi"), child(path, "hi"))};
  }
  if (shape == "halfspace") {
    return HalfSpacePath{parse_vector(field(params, path, "normal"), child(path, "normal")),
                         parse_scalar_curve(field(params, path, "offset"), child(path, "offset"))};
  }
  if (shape == "affine") {
    VectorCurve point = parse_vector_curve(field(params, path, "point"), child(path, "point"));
    Matrix basis = parse_columns(field(params, path, "basis"), child(path, "basis"), point.dim());
    return AffinePath{std::move(point), std::move(basis)};
  }
  if (shape == "set") {
    RigidPath p{parse_convex_set(field(params, path, "base"), child(path, "base")), std::nullopt, std::nullopt};
    if (const Json* s = optional_field(params, "shift")) p.shift = parse_vector_curve(*s, child(path, "shift"));
    if (const Json* g = optional_field(params, "grow")) p.grow = parse_scalar_curve(*g, child(path, "grow"));
    return p;
  }
  throw ParseError(path, "unknown shape '" + shape + "'");
}

}  // namespace

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Recover line and column from the byte offset.
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column), "invalid JSON");
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

Vector parse_vector(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], child(path, i));
  return v;
}

ConvexSet parse_convex_set(const Json& j, const std::string& path) {
  const std::string type = text(field(j, path, "type"), child(path, "type"));
  try {
    if (type == "ball") {
      return ConvexSet::ball(parse_vector(field(j, path, "center"), child(path, "center")),
                             number(field(j, path, "radius"), child(path, "radius")));
    }
    if (type == "box") {
      return ConvexSet::box(parse_vector(field(j, path, "lo"), child(path, "lo")),
                            parse_vector(field(j, path, "hi"), child(path, "hi")));
    }
    if (type == "halfspace") {
      return ConvexSet::halfspace(parse_vector(field(j, path, "normal"), child(path, "normal")),
                                  number(field(j, path, "offset"), child(path, "offset")));
    }
    if (type == "affine") {
      Vector point = parse_vector(field(j, path, "point"), child(path, "point"));
      const Json* b = optional_field(j, "basis");
      Matrix basis = b ? parse_columns(*b, child(path, "basis"), point.size()) : Matrix(point.size(), 0);
      return ConvexSet::affine(std::move(point), std::move(basis));
    }
    if (type == "point") {
      return ConvexSet::point(parse_vector(field(j, path, "at"), child(path, "at")));
    }
    if (type == "translate") {
      return ConvexSet::translate(parse_convex_set(field(j, path, "base"), child(path, "base")),
                                  parse_vector(field(j, path, "offset"), child(path, "offset")));
    }
    if (type == "dilation") {
      return dilate(parse_convex_set(field(j, path, "base"), child(path, "base")),
                    number(field(j, path, "radius"), child(path, "radius")));
    }
    if (type == "intersection") {
      const Json& ms = field(j, path, "members");
      if (!ms.is_array()) throw ParseError(child(path, "members"), "expected an array");
      std::vector<ConvexSet> members;
      for (std::size_t i = 0; i < ms.size(); ++i) {
        members.push_back(parse_convex_set(ms[i], child(child(path, "members"), i)));
      }
      DykstraOptions opts;
      if (const Json* t = optional_field(j, "tol")) opts.tol = number(*t, child(path, "tol"));
      if (const Json* n = optional_field(j, "max_iter")) {
        opts.max_iter = static_cast<long>(number(*n, child(path, "max_iter")));
      }
      return ConvexSet::intersection(std::move(members),
                                     parse_vector(field(j, path, "witness"), child(path, "witness")), opts);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(path.empty() ? "/" : path, e.what());
  }
  throw ParseError(child(path, "type"), "unknown set type '" + type + "'");
}

Json to_json(const ConvexSet& k) {
  return std::visit(
      overloaded{
          [](const Ball& b) -> Json {
            return {{"type", "ball"}, {"center", vector_json(b.center)}, {"radius", b.radius}};
          },
          [](const Box& b) -> Json { return {{"type", "box"}, {"lo", vector_json(b.lo)}, {"hi", vector_json(b.hi)}}; },
          [](const HalfSpace& h) -> Json {
            return {{"type", "halfspace"}, {"normal", vector_json(h.normal)}, {"offset", h.offset}};
          },
          [](const AffineSubspace& a) -> Json {
            Json cols = Json::array();
            for (Eigen::Index i = 0; i < a.basis.cols(); ++i) cols.push_back(vector_json(a.basis.col(i)));
            return {{"type", "affine"}, {"point", vector_json(a.point)}, {"basis", cols}};
          },
          [](const Translate& t) -> Json {
            return {{"type", "translate"}, {"base", to_json(*t.base)}, {"offset", vector_json(t.offset)}};
          },
          [](const Dilation& d) -> Json {
            return {{"type", "dilation"}, {"base", to_json(*d.base)}, {"radius", d.radius}};
          },
          [](const Intersection& s) -> Json {
            Json members = Json::array();
            for (const auto& m : s.members) members.push_back(to_json(m));
            return {{"type", "intersection"},
                    {"members", members},
                    {"witness", vector_json(s.witness)},
                    {"tol", s.options.tol},
                    {"max_iter", s.options.max_iter}};
          },
      },
      k.shape());
}

ScalarCurve parse_scalar_curve(const Json& j, const std::string& path) {
  if (j.is_number()) return ScalarCurve(j.get<Scalar>());
  if (j.is_array()) return ScalarCurve::polynomial(coefficients(j, path));
  if (j.is_object()) {
    const Json& ps = field(j, path, "pieces");
    const std::string pp = child(path, "pieces");
    if (!ps.is_array() || ps.empty()) throw ParseError(pp, "expected a nonempty array");
    std::vector<ScalarCurve::Piece> pieces;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string pi = child(pp, i);
      pieces.push_back({number(field(ps[i], pi, "from"), child(pi, "from")),
                        number(field(ps[i], pi, "to"), child(pi, "to")),
                        coefficients(field(ps[i], pi, "coeffs"), child(pi, "coeffs")), true});
    }
    try {
      return ScalarCurve::piecewise(std::move(pieces));
    } catch (const Error& e) {
      throw ParseError(pp, e.what());
    }
  }
  throw ParseError(path, "expected a number, a coefficient array or {\"pieces\": ...}");
}

VectorCurve parse_vector_curve(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ParseError(path, "expected an array of component curves");
  std::vector<ScalarCurve> comps;
  for (std::size_t i = 0; i < j.size(); ++i) comps.push_back(parse_scalar_curve(j[i], child(path, i)));
  return VectorCurve(std::move(comps));
}

MovingSet parse_moving_set(const Json& j, const std::string& path) {
  const Scalar horizon = number(field(j, path, "horizon"), child(path, "horizon"));
  const Json& segs = field(j, path, "segments");
  const std::string sp = child(path, "segments");
  if (!segs.is_array() || segs.empty()) throw ParseError(sp, "expected a nonempty array");
  std::vector<Segment> segments;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string si = child(sp, i);
    const Json& s = segs[i];
    const std::string shape = text(field(s, si, "shape"), child(si, "shape"));
    segments.push_back(Segment{number(field(s, si, "from"), child(si, "from")),
                               number(field(s, si, "to"), child(si, "to")),
                               parse_family(shape, field(s, si, "params"), child(si, "params")),
                               number(field(s, si, "lipschitz"), child(si, "lipschitz"))});
  }
  std::vector<JumpSpec> jumps;
  if (const Json* js = optional_field(j, "jumps")) {
    const std::string jp = child(path, "jumps");
    if (!js->is_array()) throw ParseError(jp, "expected an array");
    for (std::size_t i = 0; i < js->size(); ++i) {
      const std::string ji = child(jp, i);
      const Json& e = (*js)[i];
      JumpSpec spec{number(field(e, ji, "t"), child(ji, "t")), std::nullopt,
                    parse_convex_set(field(e, ji, "at"), child(ji, "at")), std::nullopt};
      if (const Json* l = optional_field(e, "left")) spec.left = parse_convex_set(*l, child(ji, "left"));
      if (const Json* r = optional_field(e, "right")) spec.right = parse_convex_set(*r, child(ji, "right"));
      jumps.push_back(std::move(spec));
    }
  }
  try {
    return MovingSet(horizon, std::move(segments), std::move(jumps));
  } catch (const Error& e) {
    throw ParseError(path.empty() ? "/" : path, e.what());
  }
}

Json to_json(const CheckReport& r) {
  Json out = {{"name", r.name},
              {"passed", r.passed},
              {"residual", r.residual},
              {"location", r.location},
              {"tolerance", r.tolerance}};
  if (!r.detail.empty()) out["detail"] = r.detail;
  return out;
}

Json to_json(const LevelGap& g) {
  return {{"level", g.level}, {"gap", g.gap}, {"bound", g.bound}, {"worst_time", g.worst_time},
          {"within_bound", g.within_bound}};
}

std::string format_scalar(Scalar x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(std::random_device{}());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string trajectory_csv(const Trajectory& y, const CsvOptions& options) {
  const Eigen::Index d = y.dim();
  const Eigen::Index n = y.size();
  std::string out = "t,side,jump,ell";
  for (Eigen::Index i = 1; i <= d; ++i) out += ",y" + std::to_string(i);
  for (Eigen::Index i = 1; i <= d; ++i) out += ",v" + std::to_string(i);
  out += '\n';

  auto row = [&](Scalar t, const char* side, bool jump, Scalar ell, const Vector& value, const Vector& v) {
    out += format_scalar(t);
    out += ',';
    out += side;
    out += jump ? ",1," : ",0,";
    out += format_scalar(ell);
    for (Eigen::Index i = 0; i < d; ++i) {
      out += ',';
      out += format_scalar(value[i]);
    }
    for (Eigen::Index i = 0; i < d; ++i) {
      out += ',';
      out += format_scalar(v[i]);
    }
    out += '\n';
  };

  std::size_t stride = 1;
  if (options.max_rows > 1 && static_cast<std::size_t>(n) > options.max_rows) {
    stride = (static_cast<std::size_t>(n) - 1 + options.max_rows - 2) / (options.max_rows - 1);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const Scalar t = y.times[static_cast<std::size_t>(j)];
    const Scalar ell = y.ell.empty() ? t : y.ell[static_cast<std::size_t>(j)];
    if (const JumpRecord* rec = y.jump_at(t)) {
      row(t, "left", true, rec->ell_left, rec->left, rec->density);
      row(t, "at", true, rec->ell_at, rec->at, rec->density);
      row(t, "right", true, rec->ell_right, rec->right, rec->density);
      continue;
    }
    if (static_cast<std::size_t>(j) % stride != 0 && j != n - 1) continue;
    row(t, "at", false, ell, y.values.col(j), y.density.col(j));
  }
  return out;
}

Trajectory parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1", "empty CSV");
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 4 || header[0] != "t" || header[1] != "side" || header[2] != "jump" || header[3] != "ell" ||
      (header.size() - 4) % 2 != 0) {
    throw ParseError("line 1", "unexpected CSV header");
  }
  const auto d = static_cast<Eigen::Index>((header.size() - 4) / 2);

  std::vector<Scalar> times, ells;
  std::vector<Vector> values, dens;
  std::vector<JumpRecord> jumps;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream r(line);
    std::string cell;
    while (std::getline(r, cell, ',')) cells.push_back(cell);
    const std::string where = "line " + std::to_string(lineno);
    if (cells.size() != header.size()) throw ParseError(where, "wrong number of columns");
    auto num = [&](const std::string& s) {
      Scalar x = 0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ParseError(where, "bad number '" + s + "'");
      return x;
    };
    const Scalar t = num(cells[0]);
    const std::string& side = cells[1];
    const bool jump = cells[2] == "1";
    const Scalar ell = num(cells[3]);
    Vector y(d), v(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      y[i] = num(cells[static_cast<std::size_t>(4 + i)]);
      v[i] = num(cells[static_cast<std::size_t>(4 + d + i)]);
    }
    if (!jump) {
      times.push_back(t);
      ells.push_back(ell);
      values.push_back(y);
      dens.push_back(v);
      continue;
    }
    if (side == "left") {
      JumpRecord rec;
      rec.t = t;
      rec.left = y;
      rec.ell_left = ell;
      rec.density = v;
      jumps.push_back(std::move(rec));
    } else if (side == "at" && !jumps.empty() && jumps.back().t == t) {
      jumps.back().at = y;
      jumps.back().ell_at = ell;
      times.push_back(t);
      ells.push_back(ell);
      values.push_back(y);
      dens.push_back(v);
    } else if (side == "right" && !jumps.empty() && jumps.back().t == t) {
      jumps.back().right = y;
      jumps.back().ell_right = ell;
    } else {
      throw ParseError(where, "jump rows must come as left, at, right");
    }
  }
  Trajectory out;
  out.times = std::move(times);
  out.ell = std::move(ells);
  out.values.resize(d, static_cast<Eigen::Index>(values.size()));
  out.density.resize(d, static_cast<Eigen::Index>(values.size()));
  for (std::size_t j = 0; j < values.size(); ++j) {
    out.values.col(static_cast<Eigen::Index>(j)) = values[j];
    out.density.col(static_cast<Eigen::Index>(j)) = dens[j];
  }
  out.jumps = std::move(jumps);
  return out;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trajectory_csv(buf.str());
}

}  // namespace sweep
