#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "model.hpp"
#include "sphere.hpp"

namespace dirtrend {

/// Trend in polar coordinates: colatitude f(t) in [0, pi] and longitude g(t)
/// in [0, 2*pi) for t in [0, 1]. Builders canonicalize raw formulas so the
/// ranges always hold (see canonical_angles).
struct TrendSpec {
  std::string label;
  std::function<double(double)> f;
  std::function<double(double)> g;
};

struct SimulationConfig {
  Eigen::Index p = 150;
  double kappa = 200.0;
  std::uint64_t seed = 1;
};

/// Monte Carlo moments of the Fisher-Langevin law with mean direction nu0:
/// resultant length lambda = E cos(theta), its standard error, and
/// gamma2 = 1 - lambda^2. Computed once per kappa from 10^6 draws with a
/// fixed internal seed, then cached.
struct LangevinMoments {
  double lambda = 1.0;
  double gamma2 = 0.0;
  double se_lambda = 0.0;
  long samples = 0;
};

LangevinMoments langevin_moments(double kappa);

/// Maps an unrestricted (theta, phi) pair to the canonical ranges using the
/// spherical identification (-theta, phi) ~ (theta, phi + pi) and reduction
/// modulo 2*pi.
std::pair<double, double> canonical_angles(double theta_raw, double phi_raw);

/// Inverse-CDF draw from the Fisher-Langevin distribution with mean direction
/// nu0 = (0,0,1) and precision kappa, driven by two uniforms. Uses an
/// overflow-free branch for kappa > 300.
Vec3 sample_fisher_langevin(double kappa, double u1, double u2);

/// Symmetric orthogonal matrix with determinant +1 carrying nu0 to mu.
/// Near the antipode (1 + nu0'mu <= 1e-12) the fixed rotation diag(1,-1,-1)
/// is returned instead, which keeps the construction deterministic.
Eigen::Matrix3d rotation_to(const Vec3& mu);

/// Unit mean directions mu_i at the grid points i/(p+1), i = 1..p.
Eigen::MatrixXd trend_directions(const TrendSpec& spec, Eigen::Index p);

struct SyntheticDataset {
  DirectionData data;
  MeanField truth;
};

/// Draws y_i by rotating Fisher-Langevin noise onto the trend directions.
/// times are set to i/(p+1). Bitwise reproducible for a fixed seed; distinct
/// replications should use seeds derived via derive_stream.
SyntheticDataset generate_dataset(const TrendSpec& spec,
                                  const SimulationConfig& config);

/// The three built-in trends: wobble, bat, jumps.
std::vector<TrendSpec> builtin_trends();
TrendSpec builtin_trend(const std::string& name);

/// Custom trend from a JSON document
/// {"label": str, "points": [{"t":..,"theta":..,"phi":..}, ...]} with t
/// strictly increasing; theta/phi are interpolated linearly and canonicalized.
TrendSpec trend_from_json(const std::string& text);

}  // namespace dirtrend
