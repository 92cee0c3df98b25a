#pragma once

#include <Eigen/Core>

#include "errors.hpp"

namespace dirtrend {

using Vec3 = Eigen::Vector3d;

/// Direction in polar coordinates: colatitude theta in [0, pi] measured from
/// the pole, longitude phi in [0, 2*pi).
struct SphericalPoint {
  double theta = 0.0;
  double phi = 0.0;
};

/// Lambert azimuthal equal-area projection of a direction. Points land in the
/// disk of radius sqrt(2); `north` records which hemisphere was projected
/// (theta <= pi/2 counts as northern).
struct LambertPoint {
  double u = 0.0;
  double v = 0.0;
  bool north = true;
};

inline constexpr double kUnitNormTolerance = 1e-8;
inline constexpr double kDefaultRowEps = 1e-10;

/// Four-quadrant arctangent with range (-pi, pi]; the first argument is the
/// sine component. Throws a Domain error at the origin, where the angle is
/// undefined.
double atan2_branch(double v, double u);

/// Unit vector (sin t cos p, sin t sin p, cos t). Validates the angle ranges.
Vec3 polar_to_cartesian(const SphericalPoint& point);

/// Recovers polar coordinates from a Cartesian direction. The input is
/// renormalized internally (it must be within kUnitNormTolerance of unit
/// length); at the poles phi is fixed to 0.
SphericalPoint cartesian_to_polar(const Vec3& x);

LambertPoint lambert_project(const SphericalPoint& point);

/// Rescales every row of B to unit length. Rows with norm below eps_row raise
/// a DegenerateRow error carrying the row index.
Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& B,
                               double eps_row = kDefaultRowEps);

bool is_unit(const Vec3& x, double tol = kUnitNormTolerance);

}  // namespace dirtrend
