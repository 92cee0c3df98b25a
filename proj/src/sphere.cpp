#include "sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dirtrend {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAngleSlack = 1e-9;
}  // namespace

double atan2_branch(double v, double u) {
  if (u == 0.0 && v == 0.0) {
    throw Error(ErrorCode::Domain, "atan2_branch: undefined at the origin");
  }
  if (u > 0.0) return std::atan(v / u);
  if (u < 0.0 && v >= 0.0) return std::atan(v / u) + kPi;
  if (u < 0.0) return std::atan(v / u) - kPi;
  return v > 0.0 ? kPi / 2.0 : -kPi / 2.0;
}

Vec3 polar_to_cartesian(const SphericalPoint& point) {
  if (point.theta < -kAngleSlack || point.theta > kPi + kAngleSlack) {
    throw Error(ErrorCode::InvalidArgument,
                "polar_to_cartesian: theta outside [0, pi]: " +
                    std::to_string(point.theta));
  }
  if (point.phi < -kAngleSlack || point.phi >= kTwoPi + kAngleSlack) {
    throw Error(ErrorCode::InvalidArgument,
                "polar_to_cartesian: phi outside [0, 2*pi): " +
                    std::to_string(point.phi));
  }
  const double st = std::sin(point.theta);
  return Vec3(st * std::cos(point.phi), st * std::sin(point.phi),
              std::cos(point.theta));
}

SphericalPoint cartesian_to_polar(const Vec3& x) {
  const double norm = x.norm();
  if (std::abs(norm - 1.0) > kUnitNormTolerance) {
    throw Error(ErrorCode::InvalidArgument,
                "cartesian_to_polar: input is not a unit vector (norm " +
                    std::to_string(norm) + ")");
  }
  const Vec3 y = x / norm;
  SphericalPoint out;
  out.theta = std::acos(std::clamp(y.z(), -1.0, 1.0));
  if (y.x() == 0.0 && y.y() == 0.0) {
    out.phi = 0.0;  // pole convention
    return out;
  }
  const double a = atan2_branch(y.y(), y.x());
  out.phi = a >= 0.0 ? a : a + kTwoPi;
  if (out.phi >= kTwoPi) out.phi = 0.0;
  return out;
}

LambertPoint lambert_project(const SphericalPoint& point) {
  LambertPoint out;
  out.north = point.theta <= kPi / 2.0;
  const double half = out.north ? point.theta / 2.0 : (kPi - point.theta) / 2.0;
  const double rho = 2.0 * std::sin(half);
  out.u = rho * std::cos(point.phi);
  out.v = rho * std::sin(point.phi);
  return out;
}

Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& B, double eps_row) {
  Eigen::MatrixXd out(B.rows(), B.cols());
  for (Eigen::Index i = 0; i < B.rows(); ++i) {
    const double norm = B.row(i).norm();
    if (norm < eps_row) {
      throw Error(ErrorCode::DegenerateRow,
                  "normalize_rows: row " + std::to_string(i) +
                      " has norm " + std::to_string(norm) +
                      " below threshold",
                  static_cast<long>(i));
    }
    out.row(i) = B.row(i) / norm;
  }
  return out;
}

bool is_unit(const Vec3& x, double tol) {
  return std::abs(x.norm() - 1.0) <= tol;
}

}  // namespace dirtrend
