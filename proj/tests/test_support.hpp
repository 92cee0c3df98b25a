#pragma once

// Test-side oracles and generators. These stay independent of the library
// code paths they check: the spectral-norm oracle goes through Eigen's dense
// eigensolver, distribution checks go through closed-form CDFs, and risk
// minima are confirmed by brute-force scans in the test bodies themselves.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "model.hpp"
#include "rng.hpp"
#include "sphere.hpp"

namespace testkit {

inline dirtrend::Vec3 random_unit_vector(dirtrend::Rng& rng) {
  // Uniform on the sphere via z ~ U[-1,1], phi ~ U[0, 2*pi).
  const double z = 2.0 * rng.next_double() - 1.0;
  const double phi = 2.0 * M_PI * rng.next_double();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

inline Eigen::MatrixXd random_unit_rows(dirtrend::Rng& rng, Eigen::Index p) {
  Eigen::MatrixXd Y(p, 3);
  for (Eigen::Index i = 0; i < p; ++i) Y.row(i) = random_unit_vector(rng);
  return Y;
}

inline Eigen::MatrixXd random_symmetric(dirtrend::Rng& rng, Eigen::Index n,
                                        bool psd) {
  Eigen::MatrixXd B(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      B(i, j) = 2.0 * rng.next_double() - 1.0;
    }
  }
  if (psd) return B * B.transpose() / static_cast<double>(n);
  return 0.5 * (B + B.transpose());
}

/// Largest |eigenvalue| via the dense symmetric eigensolver; the independent
/// oracle for the power-iteration spectral norm.
inline double spectral_norm_oracle(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// Random orthonormal basis split into `blocks` groups: a complete set of
/// mutually orthogonal eigenprojections.
inline dirtrend::SpectralSmoother random_spectral_config(dirtrend::Rng& rng,
                                                         Eigen::Index p,
                                                         int blocks) {
  Eigen::MatrixXd B(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      B(i, j) = 2.0 * rng.next_double() - 1.0;
    }
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  const Eigen::MatrixXd Q = qr.householderQ();

  dirtrend::SpectralSmoother spec;
  Eigen::Index start = 0;
  for (int k = 0; k < blocks; ++k) {
    Eigen::Index len = (k == blocks - 1)
                           ? p - start
                           : 1 + static_cast<Eigen::Index>(
                                     rng.next_double() *
                                     static_cast<double>(p - start -
                                                         (blocks - 1 - k)));
    const auto block = Q.middleCols(start, len);
    spec.projections.push_back(block * block.transpose());
    spec.counts.push_back(static_cast<double>(len));
    spec.eigenvalues.push_back(rng.next_double());
    start += len;
  }
  return spec;
}

/// One-sample Kolmogorov-Smirnov statistic against a CDF given as sorted
/// probability transforms u_(1) <= ... <= u_(n).
inline double ks_statistic(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double hi = (static_cast<double>(i) + 1.0) / n - u[i];
    const double lo = u[i] - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

/// Asymptotic KS critical value at alpha = 0.01.
inline double ks_critical_01(std::size_t n) {
  return 1.6276 / std::sqrt(static_cast<double>(n));
}

/// Closed-form CDF of cos(theta) under the Fisher-Langevin law with
/// precision kappa (mean direction at the pole), written overflow-free.
inline double langevin_cos_cdf(double kappa, double c) {
  if (c <= -1.0) return 0.0;
  if (c >= 1.0) return 1.0;
  return (std::exp(kappa * (c - 1.0)) - std::exp(-2.0 * kappa)) /
         (1.0 - std::exp(-2.0 * kappa));
}

inline double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace testkit
