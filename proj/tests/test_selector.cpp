#include <doctest.h>

#include <cmath>

#include "families.hpp"
#include "selector.hpp"
#include "synthetic.hpp"
#include "test_support.hpp"

using namespace dirtrend;

namespace {

// Family whose evaluator ignores t: every grid point ties, so the selector
// must fall back to the documented tie rule (strongest smoothing wins).
class ConstantFamily final : public SmootherFamily {
 public:
  explicit ConstantFamily(Eigen::MatrixXd A) : A_(std::move(A)) {}
  std::string label() const override { return "constant-family"; }
  int dim() const override { return 1; }
  Eigen::Index size() const override { return A_.rows(); }
  Eigen::MatrixXd matrix(const std::vector<double>& t) const override {
    check_t(t);
    return A_;
  }
  double spectral_norm_bound() const override { return 1.0; }
  double derivative_bound() const override { return 0.0; }

 private:
  Eigen::MatrixXd A_;
};

DirectionData noisy_constant_data(Eigen::Index p, double kappa,
                                  std::uint64_t seed) {
  TrendSpec constant;
  constant.label = "constant";
  constant.f = [](double) { return 1.2; };
  constant.g = [](double) { return 0.3; };
  SimulationConfig config{p, kappa, seed};
  return generate_dataset(constant, config).data;
}

}  // namespace

TEST_CASE("identity-only family reproduces the naive risk") {
  Rng rng(41);
  const DirectionData data(testkit::random_unit_rows(rng, 12));
  const double g2 = gamma2_hat(data);
  const auto identity =
      fixed_smoother("identity", Eigen::MatrixXd::Identity(12, 12));
  const FitResult fit = minimize_estimated_risk(*identity, data, g2);
  CHECK(*fit.estimated_risk == g2);  // exact
  CHECK(fit.t_selected->empty());
  CHECK((fit.d_hat - data.Y).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("constant-direction data drives PLS to maximal smoothing") {
  // constant rows leave the residual at zero for every t (constants are
  // fixed points), so with a positive dispersion estimate the trace term
  // decides and the estimated risk strictly decreases in t
  Eigen::MatrixXd constant(12, 3);
  for (int i = 0; i < 12; ++i) constant.row(i) << 0, 0, 1;
  const DirectionData const_data(constant);
  const auto family = pls_family(12, 2, 1000.0);
  SelectionConfig config;
  config.grid_points_per_axis = 101;
  const FitResult fit =
      minimize_estimated_risk(*family, const_data, 0.01, config);
  CHECK((*fit.t_selected)[0] == 1.0);

  // with gamma2hat = 0 (its actual estimate here) every grid point ties at
  // zero and the tie rule still picks maximal smoothing
  const FitResult tie_fit = minimize_estimated_risk(
      *pls_family(12, 1, 100.0), const_data, gamma2_hat(const_data), config);
  CHECK((*tie_fit.t_selected)[0] == 1.0);

  // on noisy constant-direction data the selector must still beat the naive
  // estimator by a wide margin
  const DirectionData noisy = noisy_constant_data(40, 200.0, 5);
  const double g2 = gamma2_hat(noisy);
  const FitResult noisy_fit =
      minimize_estimated_risk(*pls_family(40, 2, 1000.0), noisy, g2, config);
  CHECK(*noisy_fit.estimated_risk < g2 / 3.0);
}

TEST_CASE("returned minimum matches a brute-force grid scan") {
  Rng rng(42);
  const DirectionData data(testkit::random_unit_rows(rng, 30));
  const double g2 = gamma2_hat(data);
  const auto family = pls_family(30, 1, 500.0);
  SelectionConfig config;
  config.grid_points_per_axis = 51;
  const FitResult fit = minimize_estimated_risk(*family, data, g2, config);

  double brute = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 51; ++i) {
    const double t = i / 50.0;
    brute = std::min(brute, estimated_risk(family->matrix({t}), data.Y, g2));
  }
  CHECK(*fit.estimated_risk <= brute + 1e-12);
  CHECK(*fit.estimated_risk == doctest::Approx(brute).epsilon(1e-9));
}

TEST_CASE("refinement never increases the estimated risk") {
  Rng rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    const DirectionData data(testkit::random_unit_rows(rng, 25));
    const double g2 = gamma2_hat(data);
    const auto family = pls_family(25, 2, 800.0);
    SelectionConfig coarse;
    coarse.grid_points_per_axis = 21;
    const FitResult plain = minimize_estimated_risk(*family, data, g2, coarse);
    coarse.refine = true;
    const FitResult refined =
        minimize_estimated_risk(*family, data, g2, coarse);
    CHECK(*refined.estimated_risk <= *plain.estimated_risk);
  }
}

TEST_CASE("selection is deterministic") {
  const DirectionData data = noisy_constant_data(35, 100.0, 11);
  const double g2 = gamma2_hat(data);
  const auto family = pls_family(35, 1, 1000.0);
  SelectionConfig config;
  config.refine = true;
  const FitResult a = minimize_estimated_risk(*family, data, g2, config);
  const FitResult b = minimize_estimated_risk(*family, data, g2, config);
  CHECK((*a.t_selected)[0] == (*b.t_selected)[0]);
  CHECK(*a.estimated_risk == *b.estimated_risk);
  CHECK((a.d_hat - b.d_hat).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ties break towards stronger smoothing") {
  Rng rng(44);
  const DirectionData data(testkit::random_unit_rows(rng, 10));
  const ConstantFamily family(span3_running_average(10));
  const FitResult fit =
      minimize_estimated_risk(family, data, gamma2_hat(data));
  CHECK((*fit.t_selected)[0] == 1.0);
}

TEST_CASE("oracle parameter endpoints for PLS") {
  // constant mean field: bias term is zero everywhere, variance decreases in
  // t, so the oracle sits at full smoothing
  Eigen::MatrixXd constant(20, 3);
  for (int i = 0; i < 20; ++i) constant.row(i) << 1, 0, 0;
  const MeanField noisy = MeanField::from_directions(constant, 0.9);
  const auto family = pls_family(20, 1, 1000.0);
  SelectionConfig config;
  config.grid_points_per_axis = 101;
  const OracleSelection strong = oracle_parameter(*family, noisy, config);
  CHECK(strong.t[0] == doctest::Approx(1.0).epsilon(1e-12));

  // noiseless curved trend: identity has exactly zero risk
  const Eigen::MatrixXd mu = trend_directions(builtin_trend("wobble"), 20);
  const MeanField noiseless = MeanField::from_directions(mu, 1.0);
  const OracleSelection zero = oracle_parameter(*family, noiseless, config);
  CHECK(zero.t[0] == 0.0);
  CHECK(zero.risk == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("wobble-scale data puts the adaptive PLS risk in the known band") {
  // seed-dependent, so the band is wide: within a factor of ~3 of 0.0022
  const auto family = pls_family(150, 2, 1000.0);
  for (std::uint64_t seed : {1ULL, 2ULL}) {
    SimulationConfig config{150, 200.0, derive_stream(606, seed)};
    const auto sim = generate_dataset(builtin_trend("wobble"), config);
    const double g2 = gamma2_hat(sim.data);
    const FitResult fit = minimize_estimated_risk(*family, sim.data, g2);
    CHECK(*fit.estimated_risk > 0.0022 / 3.0);
    CHECK(*fit.estimated_risk < 0.0022 * 3.0);
  }
}

TEST_CASE("risk table contents") {
  const DirectionData data = noisy_constant_data(30, 150.0, 3);
  const auto pls2 = pls_family(30, 2, 1000.0);
  SelectionConfig config;
  config.grid_points_per_axis = 51;

  const RiskReport report = risk_table({pls2.get()}, data, config);

  // naive baseline carries gamma2hat exactly
  CHECK(report.naive_risk == report.gamma2hat);
  CHECK(report.gamma2hat == gamma2_hat(data));

  // one family plus the appended span-3 candidate
  REQUIRE(report.entries.size() == 2);
  CHECK(report.entries[0].label == pls2->label());
  CHECK(report.entries[1].label == kSpan3Label);
  CHECK(report.entries[0].params.at("d") == 2.0);

  // ranking covers all entries plus the naive baseline, ascending
  REQUIRE(report.ranking.size() == 3);
  auto risk_of = [&](const std::string& label) {
    if (label == "naive") return report.naive_risk;
    for (const auto& entry : report.entries) {
      if (entry.label == label) return entry.estimated_risk;
    }
    FAIL("unknown label in ranking");
    return 0.0;
  };
  for (std::size_t i = 1; i < report.ranking.size(); ++i) {
    CHECK(risk_of(report.ranking[i - 1]) <= risk_of(report.ranking[i]));
  }

  // an explicitly supplied span-3 candidate is not duplicated
  const auto span3 = span3_candidate(30);
  const RiskReport no_dup = risk_table({span3.get()}, data, config);
  CHECK(no_dup.entries.size() == 1);

  CHECK_THROWS_AS(risk_table({}, data, config), Error);
}

TEST_CASE("fit pipeline returns the winning directions") {
  const DirectionData data = noisy_constant_data(30, 400.0, 8);
  const auto pls2 = pls_family(30, 2, 1000.0);
  SelectionConfig config;
  config.grid_points_per_axis = 51;
  const FitOutput out = fit_pipeline({pls2.get()}, data, config);

  CHECK(out.winner == out.report.ranking.front());
  CHECK(out.fitted_directions.rows() == 30);

  // all observations point near one direction, so the winning fit should too
  const Eigen::RowVector3d reference = out.fitted_directions.row(15);
  for (Eigen::Index i = 0; i < 30; ++i) {
    CHECK((out.fitted_directions.row(i) - reference).norm() < 0.1);
  }

  // exactly constant input: the winner reproduces the common direction
  Eigen::MatrixXd constant(20, 3);
  for (int i = 0; i < 20; ++i) constant.row(i) << 0, 0, 1;
  const DirectionData const_data(constant);
  const auto small_pls = pls_family(20, 2, 1000.0);
  const FitOutput exact = fit_pipeline({small_pls.get()}, const_data, config);
  for (Eigen::Index i = 0; i < 20; ++i) {
    CHECK((exact.fitted_directions.row(i) - Eigen::RowVector3d(0, 0, 1))
              .norm() < 1e-6);
  }
}
