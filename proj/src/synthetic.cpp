#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <json.hpp>

#include "rng.hpp"

namespace dirtrend {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPoleEps = 1e-12;
constexpr std::uint64_t kMomentsOracleSeed = 0x1ec5e11a0c0ffee0ULL;
constexpr long kMomentsSamples = 1000000;

double wrap_two_pi(double phi) {
  double out = std::fmod(phi, kTwoPi);
  if (out < 0.0) out += kTwoPi;
  if (out >= kTwoPi) out = 0.0;
  return out;
}

// Wraps a raw (f, g) trend formula pair into canonical range functions. Both
// components need the full pair because a negative colatitude shifts the
// longitude by pi.
TrendSpec make_trend(std::string label, std::function<double(double)> f_raw,
                     std::function<double(double)> g_raw) {
  TrendSpec spec;
  spec.label = std::move(label);
  spec.f = [f_raw, g_raw](double t) {
    return canonical_angles(f_raw(t), g_raw(t)).first;
  };
  spec.g = [f_raw, g_raw](double t) {
    return canonical_angles(f_raw(t), g_raw(t)).second;
  };
  return spec;
}

double jumps_colatitude(double t) {
  if (t <= 0.15) return 0.2 * kPi;
  if (t <= 0.3) return 0.1 * kPi;
  if (t <= 0.45) return 0.4 * kPi;
  if (t <= 0.65) return 0.2 * kPi;
  if (t <= 0.8) return 0.3 * kPi;
  return 0.4 * kPi;
}

}  // namespace

std::pair<double, double> canonical_angles(double theta_raw, double phi_raw) {
  double theta = std::fmod(theta_raw, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  double phi = phi_raw;
  if (theta > kPi) {
    theta = kTwoPi - theta;
    phi += kPi;
  }
  return {theta, wrap_two_pi(phi)};
}

LangevinMoments langevin_moments(double kappa) {
  if (kappa <= 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "langevin_moments: kappa must be positive");
  }
  static std::mutex mutex;
  static std::map<double, LangevinMoments> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(kappa); it != cache.end()) return it->second;

  Rng rng(kMomentsOracleSeed);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long i = 0; i < kMomentsSamples; ++i) {
    const double u1 = rng.next_double();
    const Vec3 z = sample_fisher_langevin(kappa, u1, 0.0);
    sum += z.z();
    sum_sq += z.z() * z.z();
  }
  const double n = static_cast<double>(kMomentsSamples);
  LangevinMoments out;
  out.lambda = sum / n;
  out.gamma2 = 1.0 - out.lambda * out.lambda;
  const double var = std::max(0.0, sum_sq / n - out.lambda * out.lambda);
  out.se_lambda = std::sqrt(var / n);
  out.samples = kMomentsSamples;
  cache[kappa] = out;
  return out;
}

Vec3 sample_fisher_langevin(double kappa, double u1, double u2) {
  if (kappa <= 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "sample_fisher_langevin: kappa must be positive");
  }
  if (u1 < 0.0 || u1 > 1.0 || u2 < 0.0 || u2 > 1.0) {
    throw Error(ErrorCode::InvalidArgument,
                "sample_fisher_langevin: uniforms must lie in [0,1]");
  }
  double delta;
  if (kappa <= 300.0) {
    delta = std::log1p((std::exp(2.0 * kappa) - 1.0) * u1);
  } else {
    // exp(2*kappa) overflows; algebraically identical overflow-free form.
    delta = 2.0 * kappa + std::log(u1 + (1.0 - u1) * std::exp(-2.0 * kappa));
  }
  const double cos_theta = std::clamp(delta / kappa - 1.0, -1.0, 1.0);
  SphericalPoint point;
  point.theta = std::acos(cos_theta);
  point.phi = wrap_two_pi(kTwoPi * u2);
  return polar_to_cartesian(point);
}

Eigen::Matrix3d rotation_to(const Vec3& mu) {
  if (!is_unit(mu)) {
    throw Error(ErrorCode::InvalidArgument,
                "rotation_to: mu is not a unit vector");
  }
  const Vec3 unit = mu / mu.norm();
  const double denom = 1.0 + unit.z();
  if (denom <= kPoleEps) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(1, 1) = -1.0;
    flip(2, 2) = -1.0;
    return flip;
  }
  const Vec3 v = Vec3(0.0, 0.0, 1.0) + unit;
  return (v * v.transpose()) / denom - Eigen::Matrix3d::Identity();
}

Eigen::MatrixXd trend_directions(const TrendSpec& spec, Eigen::Index p) {
  if (p < 1) {
    throw Error(ErrorCode::InvalidArgument, "trend_directions: need p >= 1");
  }
  Eigen::MatrixXd mu(p, 3);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double t =
        static_cast<double>(i + 1) / static_cast<double>(p + 1);
    const double theta = spec.f(t);
    const double phi = spec.g(t);
    if (theta < 0.0 || theta > kPi) {
      throw Error(ErrorCode::Domain,
                  "trend_directions: colatitude outside [0, pi] at t = " +
                      std::to_string(t));
    }
    if (phi < 0.0 || phi >= kTwoPi) {
      throw Error(ErrorCode::Domain,
                  "trend_directions: longitude outside [0, 2*pi) at t = " +
                      std::to_string(t));
    }
    mu.row(i) = polar_to_cartesian({theta, phi});
  }
  return mu;
}

SyntheticDataset generate_dataset(const TrendSpec& spec,
                                  const SimulationConfig& config) {
  if (config.p < 2) {
    throw Error(ErrorCode::InvalidArgument, "generate_dataset: need p >= 2");
  }
  if (config.kappa <= 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "generate_dataset: kappa must be positive");
  }
  const Eigen::MatrixXd mu = trend_directions(spec, config.p);

  Rng rng(config.seed);
  Eigen::MatrixXd Y(config.p, 3);
  Eigen::VectorXd times(config.p);
  for (Eigen::Index i = 0; i < config.p; ++i) {
    const double u1 = rng.next_double();
    const double u2 = rng.next_double();
    const Vec3 z = sample_fisher_langevin(config.kappa, u1, u2);
    const Vec3 y = rotation_to(mu.row(i)) * z;
    Y.row(i) = y / y.norm();  // absorb rotation rounding
    times(i) = static_cast<double>(i + 1) / static_cast<double>(config.p + 1);
  }

  const LangevinMoments moments = langevin_moments(config.kappa);
  return SyntheticDataset{DirectionData(std::move(Y), std::move(times)),
                          MeanField::from_directions(mu, moments.lambda)};
}

std::vector<TrendSpec> builtin_trends() {
  std::vector<TrendSpec> out;
  out.push_back(make_trend(
      "wobble",
      [](double t) { return 0.3 * kPi * (t + 0.2 + 0.15 * std::sin(36.0 * kPi * t)); },
      [](double t) { return 4.0 * kPi * t; }));
  out.push_back(make_trend(
      "bat", [](double t) { return 0.8 * kPi * (t - 0.5); },
      [](double t) { return 0.4 * kPi * std::sin(6.0 * kPi * t); }));
  out.push_back(make_trend("jumps", jumps_colatitude,
                           [](double t) { return kTwoPi * t; }));
  return out;
}

TrendSpec builtin_trend(const std::string& name) {
  for (auto& spec : builtin_trends()) {
    if (spec.label == name) return spec;
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown trend '" + name + "' (expected wobble, bat or jumps)");
}

TrendSpec trend_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse,
                std::string("trend file: invalid JSON: ") + e.what());
  }
  if (!doc.contains("points") || !doc["points"].is_array() ||
      doc["points"].size() < 2) {
    throw Error(ErrorCode::Parse,
                "trend file: needs a \"points\" array with at least 2 entries");
  }
  std::vector<double> ts, thetas, phis;
  for (const auto& point : doc["points"]) {
    if (!point.contains("t") || !point.contains("theta") ||
        !point.contains("phi")) {
      throw Error(ErrorCode::Parse,
                  "trend file: each point needs t, theta and phi");
    }
    ts.push_back(point["t"].get<double>());
    thetas.push_back(point["theta"].get<double>());
    phis.push_back(point["phi"].get<double>());
  }
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ts[i] <= ts[i - 1]) {
      throw Error(ErrorCode::Parse,
                  "trend file: t values must be strictly increasing");
    }
  }
  const std::string label =
      doc.contains("label") ? doc["label"].get<std::string>() : "custom";

  auto interpolate = [](const std::vector<double>& xs,
                        const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const double w = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
    return ys[hi - 1] + w * (ys[hi] - ys[hi - 1]);
  };
  auto f_raw = [ts, thetas, interpolate](double t) {
    return interpolate(ts, thetas, t);
  };
  auto g_raw = [ts, phis, interpolate](double t) {
    return interpolate(ts, phis, t);
  };
  return make_trend(label, f_raw, g_raw);
}

}  // namespace dirtrend
