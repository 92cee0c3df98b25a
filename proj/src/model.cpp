#include "model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>

namespace dirtrend {

namespace {

void require_square_match(const Eigen::MatrixXd& A, Eigen::Index p,
                          const char* where) {
  if (A.rows() != A.cols() || A.rows() != p) {
    throw Error(ErrorCode::Dimension,
                std::string(where) + ": smoother must be " +
                    std::to_string(p) + "x" + std::to_string(p) + ", got " +
                    std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
  }
}

}  // namespace

DirectionData::DirectionData(Eigen::MatrixXd y,
                             std::optional<Eigen::VectorXd> t)
    : Y(std::move(y)), times(std::move(t)) {
  if (Y.rows() < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "DirectionData: need at least 2 rows, got " +
                    std::to_string(Y.rows()));
  }
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    const double norm = Y.row(i).norm();
    if (std::abs(norm - 1.0) > 1e-8) {
      throw Error(ErrorCode::InvalidArgument,
                  "DirectionData: row " + std::to_string(i) +
                      " is not a unit vector (norm " + std::to_string(norm) +
                      ")",
                  static_cast<long>(i));
    }
    Y.row(i) /= norm;
  }
  if (times) {
    if (times->size() != Y.rows()) {
      throw Error(ErrorCode::Dimension,
                  "DirectionData: times length does not match row count");
    }
    for (Eigen::Index i = 1; i < times->size(); ++i) {
      if ((*times)(i) < (*times)(i - 1)) {
        throw Error(ErrorCode::InvalidArgument,
                    "DirectionData: times must be sorted ascending");
      }
    }
  }
}

MeanField MeanField::from_directions(const Eigen::MatrixXd& mu,
                                     double lambda) {
  if (lambda <= 0.0 || lambda > 1.0) {
    throw Error(ErrorCode::InvalidArgument,
                "MeanField: lambda must lie in (0, 1], got " +
                    std::to_string(lambda));
  }
  for (Eigen::Index i = 0; i < mu.rows(); ++i) {
    if (std::abs(mu.row(i).norm() - 1.0) > 1e-8) {
      throw Error(ErrorCode::InvalidArgument,
                  "MeanField: mu row " + std::to_string(i) + " is not unit",
                  static_cast<long>(i));
    }
  }
  MeanField out;
  out.mu = mu;
  out.lambda = lambda;
  out.gamma2 = 1.0 - lambda * lambda;
  out.M = lambda * mu;
  return out;
}

Eigen::Index SpectralSmoother::size() const {
  return projections.empty() ? 0 : projections.front().rows();
}

Eigen::MatrixXd SpectralSmoother::assemble() const {
  if (projections.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "SpectralSmoother: empty decomposition");
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(size(), size());
  for (std::size_t k = 0; k < projections.size(); ++k) {
    A += eigenvalues[k] * projections[k];
  }
  return A;
}

void SpectralSmoother::validate(double tol) const {
  if (projections.empty() || eigenvalues.size() != projections.size() ||
      counts.size() != projections.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "SpectralSmoother: inconsistent component lists");
  }
  const Eigen::Index p = size();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t k = 0; k < projections.size(); ++k) {
    const Eigen::MatrixXd& P = projections[k];
    if (P.rows() != p || P.cols() != p) {
      throw Error(ErrorCode::Dimension,
                  "SpectralSmoother: projection size mismatch");
    }
    if ((P - P.transpose()).cwiseAbs().maxCoeff() > tol ||
        (P * P - P).cwiseAbs().maxCoeff() > tol) {
      throw Error(ErrorCode::InvalidArgument,
                  "SpectralSmoother: projection " + std::to_string(k) +
                      " is not a symmetric idempotent");
    }
    for (std::size_t j = 0; j < k; ++j) {
      if ((projections[j] * P).cwiseAbs().maxCoeff() > tol) {
        throw Error(ErrorCode::InvalidArgument,
                    "SpectralSmoother: projections " + std::to_string(j) +
                        " and " + std::to_string(k) + " are not orthogonal");
      }
    }
    sum += P;
  }
  if ((sum - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff() > tol) {
    throw Error(ErrorCode::InvalidArgument,
                "SpectralSmoother: projections do not resolve the identity");
  }
}

SpectralSmoother spectral_decompose(const Eigen::MatrixXd& A,
                                    double cluster_tol) {
  if (A.rows() != A.cols()) {
    throw Error(ErrorCode::Dimension, "spectral_decompose: matrix not square");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence,
                "spectral_decompose: eigensolver failed");
  }
  const Eigen::VectorXd& vals = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& vecs = solver.eigenvectors();

  SpectralSmoother out;
  Eigen::Index start = 0;
  while (start < vals.size()) {
    Eigen::Index end = start + 1;
    while (end < vals.size() && vals(end) - vals(end - 1) <= cluster_tol) {
      ++end;
    }
    const Eigen::Index m = end - start;
    const auto block = vecs.middleCols(start, m);
    out.projections.push_back(block * block.transpose());
    out.eigenvalues.push_back(vals.segment(start, m).mean());
    out.counts.push_back(static_cast<double>(m));
    start = end;
  }
  return out;
}

double extrinsic_loss(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Y,
                      const Eigen::MatrixXd& M) {
  require_square_match(A, Y.rows(), "extrinsic_loss");
  if (M.rows() != Y.rows() || M.cols() != Y.cols()) {
    throw Error(ErrorCode::Dimension,
                "extrinsic_loss: Y and M dimensions disagree");
  }
  const double p = static_cast<double>(Y.rows());
  return (A * Y - M).squaredNorm() / p;
}

double extrinsic_loss(const Eigen::MatrixXd& A, const DirectionData& data,
                      const MeanField& mean) {
  return extrinsic_loss(A, data.Y, mean.M);
}

double true_risk(const Eigen::MatrixXd& A, const MeanField& mean) {
  require_square_match(A, mean.M.rows(), "true_risk");
  if (!std::isfinite(mean.gamma2)) {
    throw Error(ErrorCode::InvalidArgument, "true_risk: gamma2 not finite");
  }
  const double p = static_cast<double>(mean.M.rows());
  const double variance_term = mean.gamma2 * A.squaredNorm();
  const double bias_term = (mean.M - A * mean.M).squaredNorm();
  return (variance_term + bias_term) / p;
}

double gamma2_hat(const DirectionData& data) {
  const Eigen::Index p = data.p();
  double sum = 0.0;
  for (Eigen::Index i = 1; i < p; ++i) {
    sum += (data.Y.row(i) - data.Y.row(i - 1)).squaredNorm();
  }
  return sum / (2.0 * static_cast<double>(p - 1));
}

double estimated_risk_from_fit(const Eigen::MatrixXd& Y,
                               const Eigen::MatrixXd& AY, double trace_a,
                               double gamma2hat) {
  const double p = static_cast<double>(Y.rows());
  const double residual = (Y - AY).squaredNorm() / p;
  // Written so that A = I gives back gamma2hat bitwise: the factor
  // (2 tr A - p)/p is then exactly 1.
  return residual + ((2.0 * trace_a - p) / p) * gamma2hat;
}

double estimated_risk(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Y,
                      double gamma2hat) {
  require_square_match(A, Y.rows(), "estimated_risk");
  return estimated_risk_from_fit(Y, A * Y, A.trace(), gamma2hat);
}

double estimated_risk_bias_form(const Eigen::MatrixXd& A,
                                const Eigen::MatrixXd& Y, double gamma2hat) {
  require_square_match(A, Y.rows(), "estimated_risk_bias_form");
  const double p = static_cast<double>(Y.rows());
  const Eigen::MatrixXd residual =
      Y - A * Y;  // (I - A) Y without forming I - A
  const double tr_bar =
      p - 2.0 * A.trace() + A.squaredNorm();  // tr((I - A)^2)
  return (gamma2hat * A.squaredNorm() + residual.squaredNorm() -
          gamma2hat * tr_bar) /
         p;
}

RiskBreakdown spectral_risk(const SpectralSmoother& spec,
                            const MeanField& mean) {
  spec.validate();
  if (spec.size() != mean.M.rows()) {
    throw Error(ErrorCode::Dimension,
                "spectral_risk: decomposition and mean sizes disagree");
  }
  const double p = static_cast<double>(mean.M.rows());
  RiskBreakdown out;
  for (std::size_t k = 0; k < spec.projections.size(); ++k) {
    const double tau = mean.gamma2 * spec.counts[k] / p;
    const double w = (spec.projections[k] * mean.M).squaredNorm() / p;
    const double denom = tau + w;
    out.tau.push_back(tau);
    out.w.push_back(w);
    out.a_opt.push_back(denom > 0.0 ? w / denom : 0.0);
    const double a = spec.eigenvalues[k];
    out.total += a * a * tau + (1.0 - a) * (1.0 - a) * w;
  }
  return out;
}

RiskBreakdown spectral_estimated_risk(const SpectralSmoother& spec,
                                      const Eigen::MatrixXd& Y,
                                      double gamma2hat) {
  spec.validate();
  if (spec.size() != Y.rows()) {
    throw Error(ErrorCode::Dimension,
                "spectral_estimated_risk: decomposition and data disagree");
  }
  const double p = static_cast<double>(Y.rows());
  RiskBreakdown out;
  for (std::size_t k = 0; k < spec.projections.size(); ++k) {
    const double tau = gamma2hat * spec.counts[k] / p;
    const double w = (spec.projections[k] * Y).squaredNorm() / p - tau;
    out.tau.push_back(tau);
    out.w.push_back(w);
    double a_hat = 0.0;
    if (w >= 0.0 && tau + w > 0.0) a_hat = w / (tau + w);
    out.a_opt.push_back(a_hat);
    const double a = spec.eigenvalues[k];
    out.total += a * a * tau + (1.0 - a) * (1.0 - a) * w;
  }
  return out;
}

}  // namespace dirtrend
