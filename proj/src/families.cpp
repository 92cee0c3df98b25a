#include "families.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "rng.hpp"
#include "sphere.hpp"

namespace dirtrend {

namespace {

std::string format_scale(double c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", c);
  return buf;
}

// First-difference matrix Dif(g): (g-1) x g with 1 on the diagonal and -1 on
// the superdiagonal.
Eigen::MatrixXd dif(Eigen::Index g) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(g - 1, g);
  for (Eigen::Index u = 0; u < g - 1; ++u) {
    D(u, u) = 1.0;
    D(u, u + 1) = -1.0;
  }
  return D;
}

template <typename MatVec>
double power_norm_impl(Eigen::Index n, const MatVec& mul,
                       const SpectralNormOptions& opts) {
  if (n == 0) return 0.0;

  // Power iteration on S^2: per step the Rayleigh quotient r = |S v|^2
  // approaches the squared spectral norm, also when S is indefinite. The
  // stopping rule compares Rayleigh changes against the largest quotient seen
  // so far, which keeps the tolerance relative at any matrix scale.
  auto run = [&](Eigen::VectorXd v) -> std::optional<double> {
    v.normalize();
    double r_prev = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    int settled = 0;
    for (long it = 0; it < opts.max_iterations; ++it) {
      const Eigen::VectorXd w = mul(mul(v));
      const double r = v.dot(w);
      scale = std::max(scale, std::abs(r));
      if (std::abs(r - r_prev) <= opts.rel_tol * scale) {
        if (++settled >= 2) return std::sqrt(std::max(r, 0.0));
      } else {
        settled = 0;
      }
      const double wn = w.norm();
      if (wn == 0.0) return std::sqrt(std::max(r, 0.0));
      v = w / wn;
      r_prev = r;
    }
    return std::nullopt;
  };

  Eigen::VectorXd start(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    start(i) = 1.0 + ((i % 2 == 0) ? 1.0 : -1.0);
  }
  auto result = run(start);
  if (!result) {
    throw Error(ErrorCode::NoConvergence,
                "spectral_norm: power iteration did not settle within " +
                    std::to_string(opts.max_iterations) + " iterations");
  }

  // The fixed start vector can in principle be orthogonal to the dominant
  // eigenspace. A deterministic pseudo-random probe detects that: whenever
  // |S x| exceeds the reported norm times |x|, rerun from x.
  Rng rng(0x9d2c5680ULL);
  Eigen::VectorXd probe(n);
  for (Eigen::Index i = 0; i < n; ++i) probe(i) = rng.next_double() - 0.5;
  const double pn = probe.norm();
  if (pn > 0.0 && mul(probe).norm() > (*result) * pn * (1.0 + 1e-8) + 1e-300) {
    auto retry = run(probe);
    if (!retry) {
      throw Error(ErrorCode::NoConvergence,
                  "spectral_norm: power iteration did not settle (restart)");
    }
    return std::max(*result, *retry);
  }
  return *result;
}

}  // namespace

// ---------------------------------------------------------------------------
// SmootherFamily defaults

void SmootherFamily::check_t(const std::vector<double>& t) const {
  if (static_cast<int>(t.size()) != dim()) {
    throw Error(ErrorCode::InvalidArgument,
                label() + ": parameter has dimension " +
                    std::to_string(t.size()) + ", expected " +
                    std::to_string(dim()));
  }
  for (double ti : t) {
    if (!(ti >= -1e-12 && ti <= 1.0 + 1e-12)) {
      throw Error(ErrorCode::InvalidArgument,
                  label() + ": parameter outside [0,1]");
    }
  }
}

Eigen::MatrixXd SmootherFamily::apply(const std::vector<double>& t,
                                      const Eigen::MatrixXd& Y) const {
  return matrix(t) * Y;
}

double SmootherFamily::trace(const std::vector<double>& t) const {
  return matrix(t).trace();
}

double SmootherFamily::trace_sq(const std::vector<double>& t) const {
  return matrix(t).squaredNorm();
}

std::vector<bool> SmootherFamily::smooth_increasing() const {
  return std::vector<bool>(static_cast<std::size_t>(dim()), true);
}

// ---------------------------------------------------------------------------
// Fixed matrices

Eigen::MatrixXd span3_running_average(Eigen::Index p) {
  if (p < 3) {
    throw Error(ErrorCode::InvalidArgument,
                "span3_running_average: need p >= 3, got " +
                    std::to_string(p));
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
  const double third = 1.0 / 3.0;
  A(0, 0) = 2.0 * third;
  A(0, 1) = third;
  for (Eigen::Index i = 1; i < p - 1; ++i) {
    A(i, i - 1) = third;
    A(i, i) = third;
    A(i, i + 1) = third;
  }
  A(p - 1, p - 2) = third;
  A(p - 1, p - 1) = 2.0 * third;
  return A;
}

Eigen::MatrixXd odd_span_weighted_average(Eigen::Index p,
                                          const std::vector<double>& weights) {
  if (weights.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "odd_span_weighted_average: empty weight list");
  }
  const auto h = static_cast<Eigen::Index>(weights.size() - 1);
  if (2 * h + 1 > p) {
    throw Error(ErrorCode::InvalidArgument,
                "odd_span_weighted_average: span " + std::to_string(2 * h + 1) +
                    " exceeds p = " + std::to_string(p));
  }
  double total = weights[0];
  for (std::size_t j = 1; j < weights.size(); ++j) total += 2.0 * weights[j];
  for (double w : weights) {
    if (w < 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "odd_span_weighted_average: negative weight");
    }
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument,
                "odd_span_weighted_average: weights must satisfy w0 + 2*sum "
                "w_j = 1, got " +
                    std::to_string(total));
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = -h; j <= h; ++j) {
      Eigen::Index idx = i + j;
      if (idx < 0) idx = -idx - 1;          // reflect past the first row
      if (idx >= p) idx = 2 * p - 1 - idx;  // reflect past the last row
      A(i, idx) += weights[static_cast<std::size_t>(std::abs(j))];
    }
  }
  return A;
}

Eigen::MatrixXd difference_matrix(Eigen::Index p, int d) {
  if (d < 1 || d > p - 1) {
    throw Error(ErrorCode::InvalidArgument,
                "difference_matrix: order d must satisfy 1 <= d <= p-1");
  }
  Eigen::MatrixXd delta = dif(p);
  for (int k = 2; k <= d; ++k) {
    delta = dif(p - k + 1) * delta;
  }
  return delta;
}

double spectral_norm(const Eigen::MatrixXd& S, const SpectralNormOptions& opts) {
  if (S.rows() != S.cols()) {
    throw Error(ErrorCode::Dimension, "spectral_norm: matrix not square");
  }
  return power_norm_impl(
      S.rows(), [&S](const Eigen::VectorXd& x) { return (S * x).eval(); },
      opts);
}

double spectral_norm(const Eigen::SparseMatrix<double>& S,
                     const SpectralNormOptions& opts) {
  if (S.rows() != S.cols()) {
    throw Error(ErrorCode::Dimension, "spectral_norm: matrix not square");
  }
  return power_norm_impl(
      S.rows(), [&S](const Eigen::VectorXd& x) { return (S * x).eval(); },
      opts);
}

// ---------------------------------------------------------------------------
// Running weighted average family

namespace {

class RunningAverageFamily final : public SmootherFamily {
 public:
  explicit RunningAverageFamily(Eigen::Index p) : p_(p) {
    if (p < 3) {
      throw Error(ErrorCode::InvalidArgument,
                  "weighted_running_average_family: need p >= 3");
    }
  }

  std::string label() const override { return "running-weighted-average"; }
  int dim() const override { return 1; }
  Eigen::Index size() const override { return p_; }

  // s in [0,1] maps to (t1, t2) = (1-s, s/2); s = 2/3 is the span-3 average.
  Eigen::MatrixXd matrix(const std::vector<double>& t) const override {
    check_t(t);
    const double t1 = 1.0 - t[0];
    const double t2 = t[0] / 2.0;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p_, p_);
    A(0, 0) = t1 + t2;
    A(0, 1) = t2;
    for (Eigen::Index i = 1; i < p_ - 1; ++i) {
      A(i, i - 1) = t2;
      A(i, i) = t1;
      A(i, i + 1) = t2;
    }
    A(p_ - 1, p_ - 2) = t2;
    A(p_ - 1, p_ - 1) = t1 + t2;
    return A;
  }

  Eigen::MatrixXd apply(const std::vector<double>& t,
                        const Eigen::MatrixXd& Y) const override {
    check_t(t);
    if (Y.rows() != p_) {
      throw Error(ErrorCode::Dimension, label() + ": data row count mismatch");
    }
    const double t1 = 1.0 - t[0];
    const double t2 = t[0] / 2.0;
    Eigen::MatrixXd out(p_, Y.cols());
    for (Eigen::Index i = 0; i < p_; ++i) {
      const Eigen::Index lo = i == 0 ? 0 : i - 1;        // reflected neighbor
      const Eigen::Index hi = i == p_ - 1 ? p_ - 1 : i + 1;
      out.row(i) = t1 * Y.row(i) + t2 * (Y.row(lo) + Y.row(hi));
    }
    return out;
  }

  double trace(const std::vector<double>& t) const override {
    check_t(t);
    return static_cast<double>(p_) * (1.0 - t[0]) + t[0];
  }

  double trace_sq(const std::vector<double>& t) const override {
    check_t(t);
    const double t1 = 1.0 - t[0];
    const double t2 = t[0] / 2.0;
    const double interior = t1 * t1 + 2.0 * t2 * t2;
    const double boundary = (t1 + t2) * (t1 + t2) + t2 * t2;
    return static_cast<double>(p_ - 2) * interior + 2.0 * boundary;
  }

  double spectral_norm_bound() const override { return std::sqrt(5.0); }
  double derivative_bound() const override { return 2.0; }

 private:
  Eigen::Index p_;
};

}  // namespace

std::unique_ptr<SmootherFamily> weighted_running_average_family(
    Eigen::Index p) {
  return std::make_unique<RunningAverageFamily>(p);
}

// ---------------------------------------------------------------------------
// Penalized least squares families

namespace {

// Shared plumbing for PLS evaluators with a single sparse penalty:
// A(t) = (I + c t S)^{-1} with |S|_sp = 1, applied through a sparse Cholesky
// factorization. Traces come from the penalty eigenvalues, since
// tr f(I + c t S) = sum_i f(1 + c t s_i) independently of the basis.
class SparsePlsBase : public SmootherFamily {
 public:
  SparsePlsBase(Eigen::Index p, double c) : p_(p), c_(c) {
    if (c <= 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "pls_family: penalty scale c must be positive");
    }
  }

  int dim() const override { return 1; }
  Eigen::Index size() const override { return p_; }

  Eigen::MatrixXd matrix(const std::vector<double>& t) const override {
    check_t(t);
    return solve(t[0], Eigen::MatrixXd::Identity(p_, p_));
  }

  Eigen::MatrixXd apply(const std::vector<double>& t,
                        const Eigen::MatrixXd& Y) const override {
    check_t(t);
    if (Y.rows() != p_) {
      throw Error(ErrorCode::Dimension, label() + ": data row count mismatch");
    }
    return solve(t[0], Y);
  }

  double trace(const std::vector<double>& t) const override {
    check_t(t);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < penalty_eigs_.size(); ++i) {
      sum += 1.0 / (1.0 + c_ * t[0] * penalty_eigs_(i));
    }
    return sum;
  }

  double trace_sq(const std::vector<double>& t) const override {
    check_t(t);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < penalty_eigs_.size(); ++i) {
      const double a = 1.0 / (1.0 + c_ * t[0] * penalty_eigs_(i));
      sum += a * a;
    }
    return sum;
  }

  double spectral_norm_bound() const override { return 1.0; }
  double derivative_bound() const override { return c_; }

 protected:
  // Called once the normalized penalty is known.
  void set_penalty(Eigen::SparseMatrix<double> penalty) {
    penalty_ = std::move(penalty);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.compute(Eigen::MatrixXd(penalty_), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::NoConvergence,
                  label() + ": penalty eigenvalue computation failed");
    }
    penalty_eigs_ = solver.eigenvalues().cwiseMax(0.0);
  }

  Eigen::MatrixXd solve(double t, const Eigen::MatrixXd& rhs) const {
    Eigen::SparseMatrix<double> B = (c_ * t) * penalty_;
    for (Eigen::Index i = 0; i < p_; ++i) B.coeffRef(i, i) += 1.0;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(B);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::NoConvergence,
                  label() + ": SPD factorization failed");
    }
    return llt.solve(rhs);
  }

  Eigen::Index p_;
  double c_;
  Eigen::SparseMatrix<double> penalty_;
  Eigen::VectorXd penalty_eigs_;
};

class DifferencePlsFamily final : public SparsePlsBase {
 public:
  DifferencePlsFamily(Eigen::Index p, int d, double c)
      : SparsePlsBase(p, c), d_(d) {
    const Eigen::MatrixXd delta = difference_matrix(p, d);
    Eigen::MatrixXd S = delta.transpose() * delta;
    SpectralNormOptions norm_opts;
    norm_opts.rel_tol = 1e-10;
    norm_opts.max_iterations = 2000000;
    const double s_norm = spectral_norm(S, norm_opts);
    S /= s_norm;
    set_penalty(S.sparseView(1.0, 1e-300));
  }

  std::string label() const override {
    return "pls(d=" + std::to_string(d_) + ",c=" + format_scale(c_) + ")";
  }

  std::map<std::string, double> params() const override {
    return {{"d", static_cast<double>(d_)}, {"c", c_}};
  }

 private:
  int d_;
};

class MultiPenaltyPlsFamily final : public SmootherFamily {
 public:
  MultiPenaltyPlsFamily(Eigen::Index p, std::vector<Eigen::MatrixXd> penalties,
                        double c)
      : p_(p), c_(c), penalties_(std::move(penalties)) {
    if (penalties_.empty()) {
      throw Error(ErrorCode::InvalidArgument,
                  "multi_penalty_pls_family: need at least one penalty");
    }
    if (c <= 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "multi_penalty_pls_family: penalty scale must be positive");
    }
    SpectralNormOptions norm_opts;
    norm_opts.rel_tol = 1e-10;
    norm_opts.max_iterations = 2000000;
    for (auto& Q : penalties_) {
      if (Q.rows() != p_ || Q.cols() != p_) {
        throw Error(ErrorCode::Dimension,
                    "multi_penalty_pls_family: penalty size mismatch");
      }
      if ((Q - Q.transpose()).cwiseAbs().maxCoeff() >
          1e-10 * std::max(1.0, Q.cwiseAbs().maxCoeff())) {
        throw Error(ErrorCode::InvalidArgument,
                    "multi_penalty_pls_family: penalty not symmetric");
      }
      check_psd_probe(Q);
      const double norm = spectral_norm(Q, norm_opts);
      if (norm <= 0.0) {
        throw Error(ErrorCode::InvalidArgument,
                    "multi_penalty_pls_family: zero penalty");
      }
      Q /= norm;
    }
  }

  std::string label() const override {
    return "pls-multi(k=" + std::to_string(penalties_.size()) +
           ",c=" + format_scale(c_) + ")";
  }
  int dim() const override { return static_cast<int>(penalties_.size()); }
  Eigen::Index size() const override { return p_; }

  Eigen::MatrixXd matrix(const std::vector<double>& t) const override {
    check_t(t);
    return factorize(t).solve(Eigen::MatrixXd::Identity(p_, p_));
  }

  Eigen::MatrixXd apply(const std::vector<double>& t,
                        const Eigen::MatrixXd& Y) const override {
    check_t(t);
    if (Y.rows() != p_) {
      throw Error(ErrorCode::Dimension, label() + ": data row count mismatch");
    }
    return factorize(t).solve(Y);
  }

  double spectral_norm_bound() const override { return 1.0; }
  double derivative_bound() const override { return c_; }

  std::map<std::string, double> params() const override {
    return {{"k", static_cast<double>(penalties_.size())}, {"c", c_}};
  }

 private:
  // Negative Rayleigh quotients on deterministic probe vectors flag a
  // non-PSD penalty before it reaches the factorization. The canonical basis
  // (the diagonal) is probed first, then sign patterns and pseudo-random
  // directions.
  void check_psd_probe(const Eigen::MatrixXd& Q) const {
    const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
    if (Q.diagonal().minCoeff() < -1e-10 * scale) {
      throw Error(ErrorCode::InvalidArgument,
                  "multi_penalty_pls_family: penalty fails the positive "
                  "semi-definite probe");
    }
    Rng rng(0x51ab5e11ULL);
    for (int probe = 0; probe < 16; ++probe) {
      Eigen::VectorXd x(p_);
      if (probe == 0) {
        x.setOnes();
      } else if (probe == 1) {
        for (Eigen::Index i = 0; i < p_; ++i) x(i) = (i % 2 == 0) ? 1.0 : -1.0;
      } else {
        for (Eigen::Index i = 0; i < p_; ++i) x(i) = rng.next_double() - 0.5;
      }
      if (x.dot(Q * x) < -1e-10 * scale * x.squaredNorm()) {
        throw Error(ErrorCode::InvalidArgument,
                    "multi_penalty_pls_family: penalty fails the positive "
                    "semi-definite probe");
      }
    }
  }

  Eigen::LLT<Eigen::MatrixXd> factorize(const std::vector<double>& t) const {
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(p_, p_);
    for (std::size_t i = 0; i < penalties_.size(); ++i) {
      B += (c_ * t[i]) * penalties_[i];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(B);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::NoConvergence,
                  label() + ": SPD factorization failed");
    }
    return llt;
  }

  Eigen::Index p_;
  double c_;
  std::vector<Eigen::MatrixXd> penalties_;
};

class FixedSmootherFamily final : public SmootherFamily {
 public:
  FixedSmootherFamily(std::string label, Eigen::MatrixXd A)
      : label_(std::move(label)), A_(std::move(A)) {
    if (A_.rows() != A_.cols()) {
      throw Error(ErrorCode::Dimension, "fixed_smoother: matrix not square");
    }
    if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() >
        1e-10 * std::max(1.0, A_.cwiseAbs().maxCoeff())) {
      throw Error(ErrorCode::InvalidArgument,
                  "fixed_smoother: matrix not symmetric");
    }
    // Gershgorin bound, enough for family metadata.
    norm_bound_ = A_.cwiseAbs().rowwise().sum().maxCoeff();
  }

  std::string label() const override { return label_; }
  int dim() const override { return 0; }
  Eigen::Index size() const override { return A_.rows(); }

  Eigen::MatrixXd matrix(const std::vector<double>& t) const override {
    check_t(t);
    return A_;
  }

  Eigen::MatrixXd apply(const std::vector<double>& t,
                        const Eigen::MatrixXd& Y) const override {
    check_t(t);
    return A_ * Y;
  }

  double trace(const std::vector<double>& t) const override {
    check_t(t);
    return A_.trace();
  }

  double trace_sq(const std::vector<double>& t) const override {
    check_t(t);
    return A_.squaredNorm();
  }

  double spectral_norm_bound() const override { return norm_bound_; }
  double derivative_bound() const override { return 0.0; }

 private:
  std::string label_;
  Eigen::MatrixXd A_;
  double norm_bound_;
};

}  // namespace

std::unique_ptr<SmootherFamily> pls_family(Eigen::Index p, int d, double c) {
  return std::make_unique<DifferencePlsFamily>(p, d, c);
}

std::unique_ptr<SmootherFamily> multi_penalty_pls_family(
    Eigen::Index p, std::vector<Eigen::MatrixXd> penalties, double c) {
  return std::make_unique<MultiPenaltyPlsFamily>(p, std::move(penalties), c);
}

std::unique_ptr<SmootherFamily> fixed_smoother(std::string label,
                                               Eigen::MatrixXd A) {
  return std::make_unique<FixedSmootherFamily>(std::move(label), std::move(A));
}

std::unique_ptr<SmootherFamily> span3_candidate(Eigen::Index p) {
  return fixed_smoother(kSpan3Label, span3_running_average(p));
}

FitResult apply_smoother(const Eigen::MatrixXd& A, const DirectionData& data) {
  if (A.rows() != A.cols() || A.rows() != data.p()) {
    throw Error(ErrorCode::Dimension,
                "apply_smoother: smoother and data dimensions disagree");
  }
  FitResult out;
  out.m_hat = A * data.Y;
  out.d_hat = normalize_rows(out.m_hat);
  return out;
}

}  // namespace dirtrend
