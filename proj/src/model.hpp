#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "errors.hpp"

namespace dirtrend {

/// Observed directions: a p x q matrix of unit rows, optionally tagged with a
/// sorted covariate (time). Rows are renormalized to exact unit length on
/// construction; rows farther than 1e-8 from unit length are rejected.
struct DirectionData {
  Eigen::MatrixXd Y;
  std::optional<Eigen::VectorXd> times;

  explicit DirectionData(Eigen::MatrixXd y,
                         std::optional<Eigen::VectorXd> t = std::nullopt);

  Eigen::Index p() const { return Y.rows(); }
  Eigen::Index q() const { return Y.cols(); }
};

/// Ground truth of a synthetic run: mean matrix M with rows lambda * mu_i,
/// the unit mean directions mu, the resultant length lambda and the
/// dispersion gamma2 = 1 - lambda^2.
struct MeanField {
  Eigen::MatrixXd M;
  Eigen::MatrixXd mu;
  double lambda = 1.0;
  double gamma2 = 0.0;

  static MeanField from_directions(const Eigen::MatrixXd& mu, double lambda);
};

/// Spectral decomposition of a symmetric smoother: distinct eigenvalues a_k
/// with mutually orthogonal eigenprojections P_k and their ranks tr(P_k).
struct SpectralSmoother {
  std::vector<double> eigenvalues;
  std::vector<Eigen::MatrixXd> projections;
  std::vector<double> counts;

  Eigen::Index size() const;
  Eigen::MatrixXd assemble() const;

  /// Checks symmetry, idempotence, mutual orthogonality and completeness
  /// (sum of projections equal to the identity) within `tol`.
  void validate(double tol = 1e-8) const;
};

/// Per-eigenspace risk pieces: tau_k, w_k (possibly estimated), the
/// minimizing coefficients, and the total at the smoother's own eigenvalues.
struct RiskBreakdown {
  std::vector<double> tau;
  std::vector<double> w;
  std::vector<double> a_opt;
  double total = 0.0;
};

/// Groups numerically equal eigenvalues of a symmetric matrix into distinct
/// eigenprojections. `cluster_tol` is the gap below which neighbours merge.
SpectralSmoother spectral_decompose(const Eigen::MatrixXd& A,
                                    double cluster_tol = 1e-9);

/// p^{-1} |A*Y - M|^2 in the Frobenius norm.
double extrinsic_loss(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Y,
                      const Eigen::MatrixXd& M);
double extrinsic_loss(const Eigen::MatrixXd& A, const DirectionData& data,
                      const MeanField& mean);

/// p^{-1} [gamma^2 tr(A^2) + tr((I - A)^2 M M')].
double true_risk(const Eigen::MatrixXd& A, const MeanField& mean);

/// First-difference dispersion estimator [2(p-1)]^{-1} sum |y_i - y_{i-1}|^2.
/// Rows must be in time order. Higher-order difference variants are a
/// possible extension; only first differences are implemented.
double gamma2_hat(const DirectionData& data);

/// Estimated risk, residual form: p^{-1}|Y - AY|^2 + p^{-1}(2 tr A - p) g2.
/// May be negative; callers rank candidates by it regardless of sign.
double estimated_risk(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Y,
                      double gamma2hat);

/// Same quantity when the fit A*Y and tr(A) are already available.
double estimated_risk_from_fit(const Eigen::MatrixXd& Y,
                               const Eigen::MatrixXd& AY, double trace_a,
                               double gamma2hat);

/// Estimated risk, bias-correction form:
/// p^{-1} [g2 tr(A^2) + tr((I - A)^2 (YY' - g2 I))].
/// Kept as an independent route; it must agree with estimated_risk exactly
/// (up to rounding) on every input.
double estimated_risk_bias_form(const Eigen::MatrixXd& A,
                                const Eigen::MatrixXd& Y, double gamma2hat);

/// Risk split by eigenspace with the oracle coefficients
/// a~_k = w_k / (tau_k + w_k).
RiskBreakdown spectral_risk(const SpectralSmoother& spec,
                            const MeanField& mean);

/// Estimated-risk analogue: w^_k = p^{-1}|P_k Y|^2 - tau^_k and a^_k clipped
/// to 0 whenever w^_k < 0.
RiskBreakdown spectral_estimated_risk(const SpectralSmoother& spec,
                                      const Eigen::MatrixXd& Y,
                                      double gamma2hat);

}  // namespace dirtrend
