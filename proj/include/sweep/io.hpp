#pragma once

#include "sweep/moving_set.hpp"
#include "sweep/solver.hpp"
#include "sweep/verification.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace sweep {

/// Malformed input. `where` is a JSON pointer to the offending field, or
/// "line L, column C" for syntax errors.
class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& what) : Error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

using Json = nlohmann::json;

/// Parses text, turning syntax errors into ParseError with line and column.
Json parse_json(const std::string& text);
Json read_json_file(const std::filesystem::path& path);

// Set schema, one object per node with a "type" field:
//   ball {center, radius}        box {lo, hi}
//   halfspace {normal, offset}   affine {point, basis: [columns]}
//   translate {base, offset}     dilation {base, radius}     point {at}
//   intersection {members, witness, tol?, max_iter?}
ConvexSet parse_convex_set(const Json& j, const std::string& path = "");
Json to_json(const ConvexSet& k);

// Scalar curve: a number, an array of ascending coefficients in t, or
// {"pieces": [{"from", "to", "coeffs"}]} with coefficients in (t - from).
// Vector curve: an array of scalar curves.
ScalarCurve parse_scalar_curve(const Json& j, const std::string& path = "");
VectorCurve parse_vector_curve(const Json& j, const std::string& path = "");

// Moving set: {horizon, segments: [{from, to, shape, params, lipschitz}],
// jumps: [{t, left?, at, right?}]}. Shapes and their params:
//   ball {center, radius}   box {lo, hi}   halfspace {normal, offset}
//   affine {point, basis}   set {base, shift?, grow?}
MovingSet parse_moving_set(const Json& j, const std::string& path = "");

Vector parse_vector(const Json& j, const std::string& path);

Json to_json(const CheckReport& r);
Json to_json(const LevelGap& g);

/// Shortest decimal text that reads back to the same double.
std::string format_scalar(Scalar x);

/// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

struct CsvOptions {
  /// Continuity rows kept at a uniform index stride; 0 keeps every node.
  /// Jump rows and the last node are always kept.
  std::size_t max_rows = 4097;
};

/// Header: t, side, jump, ell, y1..yd, v1..vd. A jump occupies three rows
/// sharing t with side left, at and right.
std::string trajectory_csv(const Trajectory& y, const CsvOptions& options = {});
Trajectory parse_trajectory_csv(const std::string& text);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace sweep
