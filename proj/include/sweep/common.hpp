#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sweep {

using Scalar = double;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Absolute tolerance used for set membership and cone tests when the caller
/// does not supply one.
inline constexpr Scalar kDefaultTol = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Dykstra iteration for an intersection did not settle, or a catching-up
/// step could not be projected.
class ProjectionError : public Error {
 public:
  explicit ProjectionError(const std::string& what, std::ptrdiff_t step = -1)
      : Error(what), step_(step) {}
  std::ptrdiff_t step() const { return step_; }

 private:
  std::ptrdiff_t step_;
};

/// An operation needed an exact excess and only a sampled lower bound was
/// available.
class InexactExcessError : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A proven estimate failed on computed data: either a bug or a moving set
/// whose declared Lipschitz constant is wrong.
class ConsistencyError : public Error {
 public:
  ConsistencyError(const std::string& what, int level, Scalar t)
      : Error(what), level_(level), t_(t) {}
  int level() const { return level_; }
  Scalar time() const { return t_; }

 private:
  int level_;
  Scalar t_;
};

inline void check_dim(Eigen::Index expected, Eigen::Index got, const char* what) {
  if (expected != got) {
    throw DimensionError(std::string(what) + ": dimension mismatch (expected " +
                         std::to_string(expected) + ", got " + std::to_string(got) + ")");
  }
}

}  // namespace sweep
