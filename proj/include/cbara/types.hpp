#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace cbara {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Matrix<double, 4, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat34 = Eigen::Matrix<double, 3, 4>;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

// Error hierarchy. Everything the library throws on purpose derives from
// cbara::Error so the CLI can map it onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario or CLI input that violates a documented invariant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Object and BS share a position; range, angle and Jacobian are undefined.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Matrix too ill-conditioned to invert reliably.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Box-truncated simplex with an empty feasible set.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// An (U, P, B) triple breaks one of the allocation constraints.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed the configured assignment cap.
class EnumerationCapError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

struct Position {
  double x = 0.0;
  double y = 0.0;
};

}  // namespace cbara
