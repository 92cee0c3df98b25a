#include "dirtrend.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "csv_io.hpp"
#include "errors.hpp"
#include "families.hpp"
#include "lambert_svg.hpp"
#include "model.hpp"
#include "report.hpp"
#include "selector.hpp"
#include "sphere.hpp"
#include "synthetic.hpp"
#include "version.hpp"

namespace {

thread_local std::string g_last_error;

dt_status code_of(const dirtrend::Error& e) {
  using dirtrend::ErrorCode;
  switch (e.code()) {
    case ErrorCode::InvalidArgument:
      return DT_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse:
      return DT_ERR_PARSE;
    case ErrorCode::Io:
      return DT_ERR_IO;
    case ErrorCode::Dimension:
      return DT_ERR_DIMENSION;
    case ErrorCode::DegenerateRow:
      return DT_ERR_DEGENERATE_ROW;
    case ErrorCode::NoConvergence:
      return DT_ERR_NO_CONVERGENCE;
    case ErrorCode::Domain:
      return DT_ERR_DOMAIN;
  }
  return DT_ERR_UNKNOWN;
}

template <typename Fn>
dt_status guarded(Fn&& fn) {
  try {
    fn();
    return DT_OK;
  } catch (const dirtrend::Error& e) {
    g_last_error = e.what();
    return code_of(e);
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DT_ERR_UNKNOWN;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DT_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown failure";
    return DT_ERR_UNKNOWN;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

dt_status invalid(const char* message) {
  g_last_error = message;
  return DT_ERR_INVALID_ARGUMENT;
}

}  // namespace

struct dt_dataset {
  dirtrend::DirectionData data;
};

struct dt_trend {
  dirtrend::TrendSpec spec;
};

struct dt_family {
  std::unique_ptr<dirtrend::SmootherFamily> family;
  std::string label;
};

struct dt_report {
  dirtrend::RiskReport report;
};

struct dt_plot {
  dirtrend::PlotSpec spec;
};

extern "C" {

const char* dt_version(void) { return dirtrend::kVersion; }

const char* dt_last_error(void) { return g_last_error.c_str(); }

void dt_string_free(char* s) { delete[] s; }

/* ------------------------------------------------------------------ */

namespace {

char* join_warnings(const std::vector<std::string>& warnings) {
  if (warnings.empty()) return nullptr;
  std::string joined;
  for (std::size_t i = 0; i < warnings.size(); ++i) {
    if (i > 0) joined += "\n";
    joined += warnings[i];
  }
  return dup_string(joined);
}

}  // namespace

dt_status dt_dataset_from_csv(const char* text, int degrees, dt_dataset** out,
                              char** warnings) {
  if (!text || !out) return invalid("dt_dataset_from_csv: null argument");
  return guarded([&] {
    dirtrend::CsvOptions options;
    options.degrees = degrees != 0;
    std::vector<std::string> notes;
    auto data = dirtrend::ingest_csv_string(text, options, &notes);
    *out = new dt_dataset{std::move(data)};
    if (warnings) *warnings = join_warnings(notes);
  });
}

dt_status dt_dataset_from_csv_file(const char* path, int degrees,
                                   dt_dataset** out, char** warnings) {
  if (!path || !out) return invalid("dt_dataset_from_csv_file: null argument");
  return guarded([&] {
    dirtrend::CsvOptions options;
    options.degrees = degrees != 0;
    std::vector<std::string> notes;
    auto data = dirtrend::ingest_csv_file(path, options, &notes);
    *out = new dt_dataset{std::move(data)};
    if (warnings) *warnings = join_warnings(notes);
  });
}

dt_status dt_dataset_create(long p, const double* times, const double* theta,
                            const double* phi, dt_dataset** out) {
  if (!theta || !phi || !out || p < 2) {
    return invalid("dt_dataset_create: need theta/phi arrays and p >= 2");
  }
  return guarded([&] {
    Eigen::MatrixXd Y(p, 3);
    Eigen::VectorXd t(p);
    for (long i = 0; i < p; ++i) {
      Y.row(i) =
          dirtrend::polar_to_cartesian({theta[i], phi[i]});
      t(i) = times ? times[i] : static_cast<double>(i + 1);
    }
    *out = new dt_dataset{
        dirtrend::DirectionData(std::move(Y), std::move(t))};
  });
}

long dt_dataset_rows(const dt_dataset* ds) {
  return ds ? static_cast<long>(ds->data.p()) : 0;
}

dt_status dt_dataset_get(const dt_dataset* ds, long row, double* time,
                         double* theta, double* phi) {
  if (!ds || row < 0 || row >= static_cast<long>(ds->data.p())) {
    return invalid("dt_dataset_get: bad handle or row");
  }
  return guarded([&] {
    const auto point = dirtrend::cartesian_to_polar(ds->data.Y.row(row));
    if (time) {
      *time = ds->data.times ? (*ds->data.times)(row)
                             : static_cast<double>(row + 1);
    }
    if (theta) *theta = point.theta;
    if (phi) *phi = point.phi;
  });
}

dt_status dt_dataset_to_csv(const dt_dataset* ds, int degrees, char** out) {
  if (!ds || !out) return invalid("dt_dataset_to_csv: null argument");
  return guarded([&] {
    dirtrend::CsvOptions options;
    options.degrees = degrees != 0;
    *out = dup_string(dirtrend::export_csv(ds->data, options));
  });
}

dt_status dt_dataset_gamma2hat(const dt_dataset* ds, double* out) {
  if (!ds || !out) return invalid("dt_dataset_gamma2hat: null argument");
  return guarded([&] { *out = dirtrend::gamma2_hat(ds->data); });
}

void dt_dataset_free(dt_dataset* ds) { delete ds; }

/* ------------------------------------------------------------------ */

dt_status dt_trend_builtin(const char* name, dt_trend** out) {
  if (!name || !out) return invalid("dt_trend_builtin: null argument");
  return guarded([&] { *out = new dt_trend{dirtrend::builtin_trend(name)}; });
}

dt_status dt_trend_from_json(const char* text, dt_trend** out) {
  if (!text || !out) return invalid("dt_trend_from_json: null argument");
  return guarded([&] { *out = new dt_trend{dirtrend::trend_from_json(text)}; });
}

void dt_trend_free(dt_trend* trend) { delete trend; }

dt_status dt_simulate(const dt_trend* trend, long p, double kappa,
                      uint64_t seed, dt_dataset** data, dt_dataset** truth,
                      double* lambda, double* gamma2) {
  if (!trend || !data) return invalid("dt_simulate: null argument");
  return guarded([&] {
    dirtrend::SimulationConfig config;
    config.p = p;
    config.kappa = kappa;
    config.seed = seed;
    auto result = dirtrend::generate_dataset(trend->spec, config);
    if (lambda) *lambda = result.truth.lambda;
    if (gamma2) *gamma2 = result.truth.gamma2;
    if (truth) {
      Eigen::VectorXd times = *result.data.times;
      *truth = new dt_dataset{
          dirtrend::DirectionData(result.truth.mu, std::move(times))};
    }
    *data = new dt_dataset{std::move(result.data)};
  });
}

/* ------------------------------------------------------------------ */

dt_status dt_family_pls(long p, int d, double c, dt_family** out) {
  if (!out) return invalid("dt_family_pls: null output");
  return guarded([&] {
    auto family = dirtrend::pls_family(p, d, c);
    auto label = family->label();
    *out = new dt_family{std::move(family), std::move(label)};
  });
}

dt_status dt_family_running_weighted(long p, dt_family** out) {
  if (!out) return invalid("dt_family_running_weighted: null output");
  return guarded([&] {
    auto family = dirtrend::weighted_running_average_family(p);
    auto label = family->label();
    *out = new dt_family{std::move(family), std::move(label)};
  });
}

dt_status dt_family_span3(long p, dt_family** out) {
  if (!out) return invalid("dt_family_span3: null output");
  return guarded([&] {
    auto family = dirtrend::span3_candidate(p);
    auto label = family->label();
    *out = new dt_family{std::move(family), std::move(label)};
  });
}

const char* dt_family_label(const dt_family* family) {
  return family ? family->label.c_str() : "";
}

void dt_family_free(dt_family* family) { delete family; }

/* ------------------------------------------------------------------ */

namespace {

dirtrend::SelectionConfig to_config(const dt_selection_config* config) {
  dirtrend::SelectionConfig out;
  if (config) {
    if (config->grid_points_per_axis > 0) {
      out.grid_points_per_axis = config->grid_points_per_axis;
    }
    out.refine = config->refine != 0;
    if (config->refine_tolerance > 0.0) {
      out.refine_tolerance = config->refine_tolerance;
    }
  }
  return out;
}

std::vector<const dirtrend::SmootherFamily*> to_families(
    const dt_family* const* families, long n) {
  std::vector<const dirtrend::SmootherFamily*> out;
  for (long i = 0; i < n; ++i) {
    if (!families[i] || !families[i]->family) {
      throw dirtrend::Error(dirtrend::ErrorCode::InvalidArgument,
                            "null family handle");
    }
    out.push_back(families[i]->family.get());
  }
  return out;
}

}  // namespace

dt_status dt_risk_table(const dt_dataset* ds, const dt_family* const* families,
                        long n_families, const dt_selection_config* config,
                        dt_report** out) {
  if (!ds || !families || !out || n_families < 1) {
    return invalid("dt_risk_table: need a dataset and >= 1 family");
  }
  return guarded([&] {
    auto table = dirtrend::risk_table(to_families(families, n_families),
                                      ds->data, to_config(config));
    *out = new dt_report{std::move(table)};
  });
}

dt_status dt_fit(const dt_dataset* ds, const dt_family* const* families,
                 long n_families, const dt_selection_config* config,
                 dt_report** report, dt_dataset** fitted) {
  if (!ds || !families || !report || n_families < 1) {
    return invalid("dt_fit: need a dataset and >= 1 family");
  }
  return guarded([&] {
    auto result = dirtrend::fit_pipeline(to_families(families, n_families),
                                         ds->data, to_config(config));
    if (fitted) {
      std::optional<Eigen::VectorXd> times = ds->data.times;
      *fitted = new dt_dataset{dirtrend::DirectionData(
          std::move(result.fitted_directions), std::move(times))};
    }
    *report = new dt_report{std::move(result.report)};
  });
}

double dt_report_gamma2hat(const dt_report* report) {
  return report ? report->report.gamma2hat : 0.0;
}

double dt_report_naive_risk(const dt_report* report) {
  return report ? report->report.naive_risk : 0.0;
}

long dt_report_entry_count(const dt_report* report) {
  return report ? static_cast<long>(report->report.entries.size()) : 0;
}

const char* dt_report_entry_label(const dt_report* report, long index) {
  if (!report || index < 0 ||
      index >= static_cast<long>(report->report.entries.size())) {
    return "";
  }
  return report->report.entries[static_cast<std::size_t>(index)].label.c_str();
}

dt_status dt_report_entry_risk(const dt_report* report, long index,
                               double* out) {
  if (!report || !out || index < 0 ||
      index >= static_cast<long>(report->report.entries.size())) {
    return invalid("dt_report_entry_risk: bad handle or index");
  }
  *out = report->report.entries[static_cast<std::size_t>(index)].estimated_risk;
  return DT_OK;
}

dt_status dt_report_entry_param(const dt_report* report, long index, double* t,
                                int* dim) {
  if (!report || index < 0 ||
      index >= static_cast<long>(report->report.entries.size())) {
    return invalid("dt_report_entry_param: bad handle or index");
  }
  const auto& entry = report->report.entries[static_cast<std::size_t>(index)];
  if (dim) *dim = static_cast<int>(entry.t.size());
  if (t) {
    for (std::size_t i = 0; i < entry.t.size() && i < 3; ++i) t[i] = entry.t[i];
  }
  return DT_OK;
}

long dt_report_ranking_count(const dt_report* report) {
  return report ? static_cast<long>(report->report.ranking.size()) : 0;
}

const char* dt_report_ranking_label(const dt_report* report, long index) {
  if (!report || index < 0 ||
      index >= static_cast<long>(report->report.ranking.size())) {
    return "";
  }
  return report->report.ranking[static_cast<std::size_t>(index)].c_str();
}

dt_status dt_report_to_json(const dt_report* report, char** out) {
  if (!report || !out) return invalid("dt_report_to_json: null argument");
  return guarded(
      [&] { *out = dup_string(dirtrend::report_to_json(report->report)); });
}

void dt_report_free(dt_report* report) { delete report; }

/* ------------------------------------------------------------------ */

dt_status dt_plot_new(int width_px, int height_px, int connect,
                      dt_plot** out) {
  if (!out) return invalid("dt_plot_new: null output");
  return guarded([&] {
    auto* plot = new dt_plot();
    plot->spec.width_px = width_px;
    plot->spec.height_px = height_px;
    plot->spec.connect = connect != 0;
    *out = plot;
  });
}

dt_status dt_plot_add_series(dt_plot* plot, const char* label,
                             const dt_dataset* ds) {
  if (!plot || !label || !ds) return invalid("dt_plot_add_series: null argument");
  return guarded([&] {
    dirtrend::PlotSeries series;
    series.label = label;
    for (Eigen::Index i = 0; i < ds->data.p(); ++i) {
      series.points.push_back(dirtrend::cartesian_to_polar(ds->data.Y.row(i)));
    }
    plot->spec.series.push_back(std::move(series));
  });
}

dt_status dt_plot_render(const dt_plot* plot, char** svg_out) {
  if (!plot || !svg_out) return invalid("dt_plot_render: null argument");
  return guarded(
      [&] { *svg_out = dup_string(dirtrend::render_lambert_svg(plot->spec)); });
}

void dt_plot_free(dt_plot* plot) { delete plot; }

} /* extern "C" */
