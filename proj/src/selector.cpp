#include "selector.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "sphere.hpp"

namespace dirtrend {

namespace {

constexpr double kTieEps = 1e-12;

// Lexicographic "smoothing strength" used to break exact risk ties: larger is
// smoother, with the per-axis sign taken from the family's flags.
bool smoother_than(const std::vector<double>& a, const std::vector<double>& b,
                   const std::vector<bool>& increasing) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double sa = increasing[i] ? a[i] : -a[i];
    const double sb = increasing[i] ? b[i] : -b[i];
    if (sa != sb) return sa > sb;
  }
  return false;
}

struct GridMinimum {
  std::vector<double> t;
  double value = 0.0;
};

// Golden-section search on [lo, hi]; assumes local unimodality, and callers
// only ever accept an improvement, so a bad cell cannot make things worse.
double golden_section(const std::function<double(double)>& f, double lo,
                      double hi, double tol, double& best_x) {
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  best_x = f1 <= f2 ? x1 : x2;
  return std::min(f1, f2);
}

GridMinimum grid_minimize(
    int k, const SelectionConfig& config, const std::vector<bool>& increasing,
    const std::function<double(const std::vector<double>&)>& objective) {
  if (k > 3) {
    throw Error(ErrorCode::InvalidArgument,
                "selector: grid search supports families with k <= 3, got " +
                    std::to_string(k));
  }
  if (config.grid_points_per_axis < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "selector: grid_points_per_axis must be >= 2");
  }

  if (k == 0) {
    return {{}, objective({})};
  }

  const int n = config.grid_points_per_axis;
  const double step = 1.0 / static_cast<double>(n - 1);

  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  std::vector<double> t(static_cast<std::size_t>(k), 0.0);
  std::optional<GridMinimum> best;

  // Lexicographic scan; the reduction below is order-dependent only through
  // the documented tie rule, so results do not depend on evaluation schedule.
  bool done = false;
  while (!done) {
    for (int i = 0; i < k; ++i) {
      t[static_cast<std::size_t>(i)] =
          idx[static_cast<std::size_t>(i)] == n - 1
              ? 1.0
              : idx[static_cast<std::size_t>(i)] * step;
    }
    const double value = objective(t);
    if (!best) {
      best = GridMinimum{t, value};
    } else if (std::abs(value - best->value) <= kTieEps) {
      if (smoother_than(t, best->t, increasing)) best = GridMinimum{t, value};
    } else if (value < best->value) {
      best = GridMinimum{t, value};
    }

    int axis = k - 1;
    while (axis >= 0) {
      if (++idx[static_cast<std::size_t>(axis)] < n) break;
      idx[static_cast<std::size_t>(axis)] = 0;
      --axis;
    }
    done = axis < 0;
  }

  if (config.refine) {
    GridMinimum refined = *best;
    const int cycles = k == 1 ? 1 : 2;
    for (int cycle = 0; cycle < cycles; ++cycle) {
      for (int axis = 0; axis < k; ++axis) {
        const double center = refined.t[static_cast<std::size_t>(axis)];
        const double lo = std::max(0.0, center - step);
        const double hi = std::min(1.0, center + step);
        std::vector<double> probe = refined.t;
        auto line = [&](double x) {
          probe[static_cast<std::size_t>(axis)] = x;
          return objective(probe);
        };
        double x_best = center;
        const double value =
            golden_section(line, lo, hi, config.refine_tolerance, x_best);
        if (value < refined.value) {
          refined.t[static_cast<std::size_t>(axis)] = x_best;
          refined.value = value;
        }
      }
    }
    // Refinement may only improve on the grid minimum.
    if (refined.value < best->value) best = refined;
  }
  return *best;
}

}  // namespace

FitResult minimize_estimated_risk(const SmootherFamily& family,
                                  const DirectionData& data, double gamma2hat,
                                  const SelectionConfig& config) {
  if (family.size() != data.p()) {
    throw Error(ErrorCode::Dimension,
                "minimize_estimated_risk: family built for p = " +
                    std::to_string(family.size()) + ", data has p = " +
                    std::to_string(data.p()));
  }
  const auto objective = [&](const std::vector<double>& t) {
    return estimated_risk_from_fit(data.Y, family.apply(t, data.Y),
                                   family.trace(t), gamma2hat);
  };
  const GridMinimum best = grid_minimize(family.dim(), config,
                                         family.smooth_increasing(), objective);

  FitResult out;
  out.m_hat = family.apply(best.t, data.Y);
  out.d_hat = normalize_rows(out.m_hat);
  out.t_selected = best.t;
  out.estimated_risk = best.value;
  return out;
}

OracleSelection oracle_parameter(const SmootherFamily& family,
                                 const MeanField& mean,
                                 const SelectionConfig& config) {
  if (family.size() != mean.M.rows()) {
    throw Error(ErrorCode::Dimension,
                "oracle_parameter: family and mean field sizes disagree");
  }
  const double p = static_cast<double>(mean.M.rows());
  const auto objective = [&](const std::vector<double>& t) {
    const double variance_term = mean.gamma2 * family.trace_sq(t);
    const double bias_term = (mean.M - family.apply(t, mean.M)).squaredNorm();
    return (variance_term + bias_term) / p;
  };
  const GridMinimum best = grid_minimize(family.dim(), config,
                                         family.smooth_increasing(), objective);
  return {best.t, best.value};
}

namespace {

struct TableRow {
  RiskEntry entry;
  FitResult fit;
};

std::vector<TableRow> build_rows(
    const std::vector<const SmootherFamily*>& families,
    const DirectionData& data, double gamma2hat,
    const SelectionConfig& config) {
  std::vector<TableRow> rows;
  bool have_span3 = false;
  for (const SmootherFamily* family : families) {
    if (family == nullptr) {
      throw Error(ErrorCode::InvalidArgument, "risk_table: null family");
    }
    if (family->label() == kSpan3Label) have_span3 = true;
    TableRow row;
    row.fit = minimize_estimated_risk(*family, data, gamma2hat, config);
    row.entry = RiskEntry{family->label(), *row.fit.t_selected,
                          *row.fit.estimated_risk, family->params()};
    rows.push_back(std::move(row));
  }
  if (!have_span3 && data.p() >= 3) {
    const auto span3 = span3_candidate(data.p());
    TableRow row;
    row.fit = minimize_estimated_risk(*span3, data, gamma2hat, config);
    row.entry = RiskEntry{span3->label(), {}, *row.fit.estimated_risk, {}};
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

RiskReport risk_table(const std::vector<const SmootherFamily*>& families,
                      const DirectionData& data,
                      const SelectionConfig& config) {
  if (families.empty()) {
    throw Error(ErrorCode::InvalidArgument, "risk_table: empty family list");
  }
  RiskReport report;
  report.config = config;
  report.gamma2hat = gamma2_hat(data);
  report.naive_risk = report.gamma2hat;

  auto rows = build_rows(families, data, report.gamma2hat, config);
  for (auto& row : rows) report.entries.push_back(std::move(row.entry));

  std::vector<std::pair<std::string, double>> ranked;
  for (const auto& entry : report.entries) {
    ranked.emplace_back(entry.label, entry.estimated_risk);
  }
  ranked.emplace_back("naive", report.naive_risk);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     return a.second < b.second;
                   });
  for (const auto& [label, risk] : ranked) {
    (void)risk;
    report.ranking.push_back(label);
  }
  return report;
}

FitOutput fit_pipeline(const std::vector<const SmootherFamily*>& families,
                       const DirectionData& data,
                       const SelectionConfig& config) {
  if (families.empty()) {
    throw Error(ErrorCode::InvalidArgument, "fit_pipeline: empty family list");
  }
  FitOutput out;
  out.report.config = config;
  out.report.gamma2hat = gamma2_hat(data);
  out.report.naive_risk = out.report.gamma2hat;

  auto rows = build_rows(families, data, out.report.gamma2hat, config);

  std::vector<std::pair<std::string, double>> ranked;
  for (const auto& row : rows) {
    ranked.emplace_back(row.entry.label, row.entry.estimated_risk);
  }
  ranked.emplace_back("naive", out.report.naive_risk);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     return a.second < b.second;
                   });

  out.winner = ranked.front().first;
  if (out.winner == "naive") {
    out.fitted_directions = data.Y;
  } else {
    for (const auto& row : rows) {
      if (row.entry.label == out.winner) {
        out.fitted_directions = row.fit.d_hat;
        break;
      }
    }
  }
  for (auto& row : rows) out.report.entries.push_back(std::move(row.entry));
  for (const auto& [label, risk] : ranked) {
    (void)risk;
    out.report.ranking.push_back(label);
  }
  return out;
}

}  // namespace dirtrend
