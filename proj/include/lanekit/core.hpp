// Scalar/matrix aliases and the error hierarchy shared across the library.
#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lanekit {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

// One point per row, columns are (x, y, z) in the ego frame:
// x lateral-right, y longitudinal-forward, z up. Units are meters.
template <typename Scalar>
using Points = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vec3d = Vec3<double>;
using Pointsd = Points<double>;

// Separation below which two points are treated as coincident.
inline constexpr double kCoincidentTol = 1e-9;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateLane : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };
struct InsufficientPoints : Error { using Error::Error; };
struct OutOfDomain : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct TooFewPoints : Error { using Error::Error; };
struct InvalidClass : Error { using Error::Error; };
struct TooManyGroundTruths : Error { using Error::Error; };
struct InvalidMatrix : Error { using Error::Error; };
struct InvalidAssignment : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct BehindCamera : Error { using Error::Error; };
struct InvalidRig : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace lanekit
