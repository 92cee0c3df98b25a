#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "families.hpp"
#include "model.hpp"

namespace dirtrend {

struct SelectionConfig {
  int grid_points_per_axis = 201;
  bool refine = false;
  double refine_tolerance = 1e-6;
};

/// Minimizes the estimated risk of A(t) over the family's parameter box by
/// exhaustive grid search (k <= 3), optionally followed by per-axis
/// golden-section refinement inside the best grid cell. Ties within 1e-12 are
/// broken towards the stronger-smoothing parameter, so identical inputs give
/// identical output. The returned estimated risk never exceeds the best grid
/// value.
FitResult minimize_estimated_risk(const SmootherFamily& family,
                                  const DirectionData& data, double gamma2hat,
                                  const SelectionConfig& config = {});

struct OracleSelection {
  std::vector<double> t;
  double risk = 0.0;
};

/// Grid minimizer of the true risk; only meaningful in synthetic runs where
/// the mean field is known. Benchmark counterpart of minimize_estimated_risk.
OracleSelection oracle_parameter(const SmootherFamily& family,
                                 const MeanField& mean,
                                 const SelectionConfig& config = {});

struct RiskEntry {
  std::string label;
  std::vector<double> t;
  double estimated_risk = 0.0;
  std::map<std::string, double> params;
};

/// Comparison table across candidate families. The span-3 running average is
/// appended as a fixed candidate (unless already supplied or p < 3), the
/// naive estimator A = I enters with risk exactly gamma2_hat, and the ranking
/// lists all labels ascending by estimated risk.
struct RiskReport {
  double gamma2hat = 0.0;
  std::vector<RiskEntry> entries;
  double naive_risk = 0.0;
  std::vector<std::string> ranking;
  SelectionConfig config;
};

RiskReport risk_table(const std::vector<const SmootherFamily*>& families,
                      const DirectionData& data,
                      const SelectionConfig& config = {});

/// risk_table plus the fitted directions of the top-ranked candidate (the
/// observations themselves when the naive estimator wins).
struct FitOutput {
  RiskReport report;
  std::string winner;
  Eigen::MatrixXd fitted_directions;
};

FitOutput fit_pipeline(const std::vector<const SmootherFamily*>& families,
                       const DirectionData& data,
                       const SelectionConfig& config = {});

}  // namespace dirtrend
