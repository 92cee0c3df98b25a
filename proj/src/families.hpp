#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace dirtrend {

/// Fit produced by one smoother: the raw fit M^ = A*Y and its row-normalized
/// directions D^. The selector fills in t_selected and estimated_risk.
struct FitResult {
  Eigen::MatrixXd m_hat;
  Eigen::MatrixXd d_hat;
  std::optional<std::vector<double>> t_selected;
  std::optional<double> estimated_risk;
};

/// A parameterized family of symmetric p x p smoothers over the box [0,1]^k.
/// Families may override apply/trace/trace_sq with cheaper routes than
/// forming the full matrix; the defaults go through matrix(t). Evaluators are
/// pure, so one family instance may be evaluated concurrently at many t.
class SmootherFamily {
 public:
  virtual ~SmootherFamily() = default;

  virtual std::string label() const = 0;
  virtual int dim() const = 0;
  virtual Eigen::Index size() const = 0;

  virtual Eigen::MatrixXd matrix(const std::vector<double>& t) const = 0;

  virtual Eigen::MatrixXd apply(const std::vector<double>& t,
                                const Eigen::MatrixXd& Y) const;
  virtual double trace(const std::vector<double>& t) const;
  virtual double trace_sq(const std::vector<double>& t) const;

  /// Per-coordinate flag: does increasing t_i smooth more? Used only to break
  /// exact ties in the selector.
  virtual std::vector<bool> smooth_increasing() const;

  /// Uniform bound on |A(t)|_sp over the box (family metadata).
  virtual double spectral_norm_bound() const = 0;

  /// Lipschitz constant of t -> A(t) in spectral norm, for continuity probes.
  virtual double derivative_bound() const = 0;

  /// Construction parameters worth reporting (e.g. d and c for PLS).
  virtual std::map<std::string, double> params() const { return {}; }

 protected:
  void check_t(const std::vector<double>& t) const;
};

/// Tridiagonal running average with (2/3, 1/3) boundary rows.
Eigen::MatrixXd span3_running_average(Eigen::Index p);

/// Banded symmetric weighted running average of span 2h+1 with boundary
/// reflection. `weights` lists the center-out weights w_0..w_h and must
/// satisfy w_0 + 2 sum_{j>=1} w_j = 1 with all w_j >= 0.
Eigen::MatrixXd odd_span_weighted_average(Eigen::Index p,
                                          const std::vector<double>& weights);

/// d-th difference matrix, (p-d) x p, built by the usual recursion from the
/// first-difference matrix.
Eigen::MatrixXd difference_matrix(Eigen::Index p, int d);

struct SpectralNormOptions {
  double rel_tol = 1e-13;
  long max_iterations = 250000;
};

/// Largest eigenvalue magnitude of a symmetric matrix by power iteration on
/// S^2 with a deterministic start vector. Throws NoConvergence when the
/// Rayleigh quotient has not settled within the iteration cap.
double spectral_norm(const Eigen::MatrixXd& S,
                     const SpectralNormOptions& opts = {});
double spectral_norm(const Eigen::SparseMatrix<double>& S,
                     const SpectralNormOptions& opts = {});

/// One-parameter running weighted average family: s in [0,1] maps to the
/// tridiagonal smoother with weights (t1, t2) = (1-s, s/2); s = 2/3
/// reproduces span3_running_average and s = 0 is the identity.
std::unique_ptr<SmootherFamily> weighted_running_average_family(
    Eigen::Index p);

/// d-th difference penalized least squares family
/// A(t) = (I + c t D_d' D_d / |D_d' D_d|_sp)^{-1}, t in [0,1], realized by a
/// sparse SPD factorization and solve (never an explicit inverse).
std::unique_ptr<SmootherFamily> pls_family(Eigen::Index p, int d, double c);

/// General PLS family A(t) = (I + c sum t_i Q_i)^{-1} for symmetric PSD
/// penalties Q_i, each normalized internally to unit spectral norm.
std::unique_ptr<SmootherFamily> multi_penalty_pls_family(
    Eigen::Index p, std::vector<Eigen::MatrixXd> penalties, double c);

/// Zero-parameter family holding one fixed smoother (used for the span-3
/// candidate and for identity baselines).
std::unique_ptr<SmootherFamily> fixed_smoother(std::string label,
                                               Eigen::MatrixXd A);

/// Label under which risk_table reports the span-3 running average.
inline constexpr const char* kSpan3Label = "running-average(3)";
std::unique_ptr<SmootherFamily> span3_candidate(Eigen::Index p);

/// M^ = A*Y and D^ = normalize_rows(M^). Propagates the degenerate-row error
/// when a fitted row collapses below the normalization threshold.
FitResult apply_smoother(const Eigen::MatrixXd& A, const DirectionData& data);

}  // namespace dirtrend
