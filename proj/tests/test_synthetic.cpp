#include <doctest.h>

#include <cmath>
#include <numbers>

#include "synthetic.hpp"
#include "test_support.hpp"

using namespace dirtrend;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("canonical_angles") {
  // in-range pairs pass through
  auto [t0, p0] = canonical_angles(1.0, 2.0);
  CHECK(t0 == doctest::Approx(1.0));
  CHECK(p0 == doctest::Approx(2.0));

  // negative colatitude flips the longitude by pi
  auto [t1, p1] = canonical_angles(-0.2 * kPi, 0.0);
  CHECK(t1 == doctest::Approx(0.2 * kPi));
  CHECK(p1 == doctest::Approx(kPi));

  // longitude wraps modulo 2 pi
  auto [t2, p2] = canonical_angles(0.5, -4.0 * kPi);
  CHECK(t2 == doctest::Approx(0.5));
  CHECK(p2 == doctest::Approx(0.0));

  // colatitude beyond pi reflects back
  auto [t3, p3] = canonical_angles(1.2 * kPi, 0.5);
  CHECK(t3 == doctest::Approx(0.8 * kPi));
  CHECK(p3 == doctest::Approx(0.5 + kPi));
}

TEST_CASE("fisher-langevin sampler endpoints") {
  // u1 = 1: delta = 2 kappa, cos(theta) = 1, the mean direction itself
  const Vec3 top = sample_fisher_langevin(50.0, 1.0, 0.25);
  CHECK((top - Vec3(0, 0, 1)).norm() < 1e-12);

  // u1 = 0: the antipode
  const Vec3 bottom = sample_fisher_langevin(50.0, 0.0, 0.0);
  CHECK((bottom - Vec3(0, 0, -1)).norm() < 1e-12);

  // u2 sets the longitude: u2 = 0.25 -> phi = pi/2
  const Vec3 quarter = sample_fisher_langevin(5.0, 0.5, 0.25);
  CHECK(std::abs(quarter.x()) < 1e-12);
  CHECK(quarter.y() > 0.0);

  CHECK_THROWS_AS(sample_fisher_langevin(-1.0, 0.5, 0.5), Error);
  CHECK_THROWS_AS(sample_fisher_langevin(10.0, 1.5, 0.5), Error);
}

TEST_CASE("overflow-free branch matches the plain formula") {
  // evaluate the plain expression in extended precision at kappa = 350,
  // where double-precision exp(2 kappa) would overflow
  const double kappa = 350.0;
  for (double u1 : {1e-12, 0.01, 0.37, 0.82, 0.999999}) {
    const long double exact_delta =
        std::log(1.0L + (std::exp(2.0L * static_cast<long double>(kappa)) -
                         1.0L) *
                            static_cast<long double>(u1));
    const long double exact_cos = exact_delta / kappa - 1.0L;
    const Vec3 z = sample_fisher_langevin(kappa, u1, 0.0);
    CHECK(std::abs(z.z() - static_cast<double>(exact_cos)) < 1e-12);
  }
}

TEST_CASE("rotation_to contract") {
  const Vec3 nu0(0, 0, 1);

  // mu = nu0: 2 nu0 nu0' - I, which fixes nu0
  const Eigen::Matrix3d at_pole = rotation_to(nu0);
  Eigen::Matrix3d expected = 2.0 * nu0 * nu0.transpose() -
                             Eigen::Matrix3d::Identity();
  CHECK((at_pole - expected).cwiseAbs().maxCoeff() < 1e-14);

  // mu on the equator
  const Vec3 east(1, 0, 0);
  CHECK((rotation_to(east) * nu0 - east).norm() < 1e-12);

  // antipodal fallback
  const Eigen::Matrix3d flip = rotation_to(Vec3(0, 0, -1));
  Eigen::Matrix3d diag = Eigen::Matrix3d::Identity();
  diag(1, 1) = -1.0;
  diag(2, 2) = -1.0;
  CHECK((flip - diag).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(51);
  for (int i = 0; i < 200; ++i) {
    const Vec3 mu = testkit::random_unit_vector(rng);
    const Eigen::Matrix3d omega = rotation_to(mu);
    CHECK((omega * nu0 - mu).norm() < 1e-10);
    CHECK((omega * omega.transpose() - Eigen::Matrix3d::Identity())
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK(std::abs(omega.determinant() - 1.0) < 1e-10);
    CHECK((omega - omega.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    // fixes the bisector of nu0 and mu
    const Vec3 axis = (nu0 + mu).normalized();
    CHECK((omega * axis - axis).norm() < 1e-10);
  }

  CHECK_THROWS_AS(rotation_to(Vec3(0.3, 0, 0)), Error);
}

TEST_CASE("builtin trends hit the documented values") {
  const TrendSpec wobble = builtin_trend("wobble");
  // sin(18 pi) = 0: f(0.5) = 0.21 pi
  CHECK(wobble.f(0.5) == doctest::Approx(0.21 * kPi).epsilon(1e-9));
  // g(0.5) = 2 pi wraps to 0
  CHECK(wobble.g(0.5) == doctest::Approx(0.0).epsilon(1e-9));

  const TrendSpec jumps = builtin_trend("jumps");
  CHECK(jumps.f(0.1) == doctest::Approx(0.2 * kPi).epsilon(1e-12));
  CHECK(jumps.g(0.5) == doctest::Approx(kPi).epsilon(1e-12));

  const TrendSpec bat = builtin_trend("bat");
  // raw pair at t = 0.25 is (-0.2 pi, -0.4 pi); the negative colatitude
  // flips, leaving (0.2 pi, 0.6 pi)
  CHECK(bat.f(0.25) == doctest::Approx(0.2 * kPi).epsilon(1e-12));
  CHECK(bat.g(0.25) == doctest::Approx(0.6 * kPi).epsilon(1e-12));

  CHECK_THROWS_AS(builtin_trend("spiral"), Error);
}

TEST_CASE("builtin trends respect the canonical ranges") {
  for (const auto& spec : builtin_trends()) {
    for (int i = 0; i <= 10000; ++i) {
      const double t = i / 10000.0;
      const double theta = spec.f(t);
      const double phi = spec.g(t);
      CHECK(theta >= 0.0);
      CHECK(theta <= kPi);
      CHECK(phi >= 0.0);
      CHECK(phi < 2.0 * kPi);
    }
  }
}

TEST_CASE("trend_directions") {
  TrendSpec east;
  east.label = "east";
  east.f = [](double) { return kPi / 2; };
  east.g = [](double) { return 0.0; };
  const Eigen::MatrixXd mu = trend_directions(east, 5);
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK((mu.row(i) - Eigen::RowVector3d(1, 0, 0)).norm() < 1e-12);
  }

  TrendSpec broken;
  broken.label = "broken";
  broken.f = [](double) { return -1.0; };
  broken.g = [](double) { return 0.0; };
  CHECK_THROWS_AS(trend_directions(broken, 4), Error);
}

TEST_CASE("generate_dataset determinism and structure") {
  SimulationConfig config;
  config.p = 40;
  config.kappa = 200.0;
  config.seed = 123;
  const TrendSpec wobble = builtin_trend("wobble");
  const auto a = generate_dataset(wobble, config);
  const auto b = generate_dataset(wobble, config);
  CHECK((a.data.Y - b.data.Y).cwiseAbs().maxCoeff() == 0.0);

  // times are i/(p+1)
  CHECK((*a.data.times)(0) == doctest::Approx(1.0 / 41.0).epsilon(1e-15));
  CHECK((*a.data.times)(39) == doctest::Approx(40.0 / 41.0).epsilon(1e-15));

  // truth carries the cached Monte Carlo moments
  const LangevinMoments moments = langevin_moments(200.0);
  CHECK(a.truth.lambda == moments.lambda);
  CHECK(a.truth.gamma2 == doctest::Approx(1.0 - moments.lambda * moments.lambda));

  // different seed, different draws
  config.seed = 124;
  const auto c = generate_dataset(wobble, config);
  CHECK((a.data.Y - c.data.Y).cwiseAbs().maxCoeff() > 0.0);

  // rows are exactly unit after the post-rotation renormalization
  for (Eigen::Index i = 0; i < a.data.p(); ++i) {
    CHECK(std::abs(a.data.Y.row(i).norm() - 1.0) < 1e-15);
  }
}

TEST_CASE("rotated samples keep the target mean direction") {
  const double kappa = 200.0;
  const Vec3 mu = Vec3(0.3, -0.5, 0.6).normalized();
  const Eigen::Matrix3d omega = rotation_to(mu);
  Rng rng(0xabcdULL);
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u1 = rng.next_double();
    const double u2 = rng.next_double();
    sum += omega * sample_fisher_langevin(kappa, u1, u2);
  }
  const Vec3 mean_dir = sum.normalized();
  CHECK(std::acos(std::clamp(mean_dir.dot(mu), -1.0, 1.0)) < 0.01);
}

TEST_CASE("huge precision concentrates the draws on the trend") {
  SimulationConfig config;
  config.p = 100;
  config.kappa = 1e6;
  config.seed = 77;
  const auto sim = generate_dataset(builtin_trend("jumps"), config);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < config.p; ++i) {
    const double dot =
        std::clamp(sim.data.Y.row(i).dot(sim.truth.mu.row(i)), -1.0, 1.0);
    worst = std::max(worst, std::acos(dot));
  }
  CHECK(worst < 0.01);
}

TEST_CASE("sampler marginals at moderate sample size") {
  const double kappa = 200.0;
  const std::size_t n = 20000;
  Rng rng(0xfeedULL);
  std::vector<double> phi_u(n), cos_u(n);
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const double u1 = rng.next_double();
    const double u2 = rng.next_double();
    const Vec3 z = sample_fisher_langevin(kappa, u1, u2);
    sum += z;
    phi_u[i] = cartesian_to_polar(z).phi / (2.0 * kPi);
    cos_u[i] = testkit::langevin_cos_cdf(kappa, z.z());
  }
  // phi uniform and cos(theta) distributed per the closed-form CDF
  CHECK(testkit::ks_statistic(phi_u) < testkit::ks_critical_01(n));
  CHECK(testkit::ks_statistic(cos_u) < testkit::ks_critical_01(n));

  // empirical mean direction close to the pole
  const Vec3 mean_dir = sum.normalized();
  CHECK(std::acos(std::clamp(mean_dir.z(), -1.0, 1.0)) < 0.01);
}

TEST_CASE("trend_from_json") {
  const std::string doc = R"({
    "label": "ramp",
    "points": [
      {"t": 0.0, "theta": 0.2, "phi": 0.0},
      {"t": 1.0, "theta": 1.2, "phi": 3.0}
    ]
  })";
  const TrendSpec spec = trend_from_json(doc);
  CHECK(spec.label == "ramp");
  CHECK(spec.f(0.5) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(spec.g(0.5) == doctest::Approx(1.5).epsilon(1e-12));
  // clamped outside the listed t range
  CHECK(spec.f(-1.0) == doctest::Approx(0.2).epsilon(1e-12));

  CHECK_THROWS_AS(trend_from_json("not json"), Error);
  CHECK_THROWS_AS(trend_from_json(R"({"points": []})"), Error);
  CHECK_THROWS_AS(
      trend_from_json(
          R"({"points": [{"t":0,"theta":1,"phi":0},{"t":0,"theta":1,"phi":0}]})"),
      Error);
}
