// dirtrend command line front end. Talks to the core exclusively through the
// C API in dirtrend.h; all file writing happens here, single-threaded.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dirtrend.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitNumericalError = 3;

int exit_code_for(dt_status status) {
  switch (status) {
    case DT_OK:
      return kExitOk;
    case DT_ERR_INVALID_ARGUMENT:
    case DT_ERR_PARSE:
    case DT_ERR_IO:
    case DT_ERR_DIMENSION:
    case DT_ERR_DOMAIN:
      return kExitInputError;
    case DT_ERR_DEGENERATE_ROW:
    case DT_ERR_NO_CONVERGENCE:
    case DT_ERR_UNKNOWN:
    default:
      return kExitNumericalError;
  }
}

[[noreturn]] void fail(dt_status status) {
  std::cerr << "error: " << dt_last_error() << "\n";
  std::exit(exit_code_for(status));
}

void check(dt_status status) {
  if (status != DT_OK) fail(status);
}

struct StringDeleter {
  void operator()(char* s) const { dt_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;

struct DatasetDeleter {
  void operator()(dt_dataset* ds) const { dt_dataset_free(ds); }
};
using Dataset = std::unique_ptr<dt_dataset, DatasetDeleter>;

struct FamilyDeleter {
  void operator()(dt_family* f) const { dt_family_free(f); }
};
using Family = std::unique_ptr<dt_family, FamilyDeleter>;

struct ReportDeleter {
  void operator()(dt_report* r) const { dt_report_free(r); }
};
using Report = std::unique_ptr<dt_report, ReportDeleter>;

struct TrendDeleter {
  void operator()(dt_trend* t) const { dt_trend_free(t); }
};
using Trend = std::unique_ptr<dt_trend, TrendDeleter>;

struct PlotDeleter {
  void operator()(dt_plot* p) const { dt_plot_free(p); }
};
using Plot = std::unique_ptr<dt_plot, PlotDeleter>;

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    std::cerr << "error: cannot write '" << path.string() << "'\n";
    std::exit(kExitInputError);
  }
  file << text;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    std::cerr << "error: cannot read '" << path.string() << "'\n";
    std::exit(kExitInputError);
  }
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

std::filesystem::path prepare_out_dir(const std::string& out) {
  std::filesystem::path dir = out.empty() ? "." : out;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory '" << dir.string()
              << "': " << ec.message() << "\n";
    std::exit(kExitInputError);
  }
  return dir;
}

// Family specs: "pls:d=2,c=1000", "pls:d=1", "run3", "runw".
Family parse_family(const std::string& spec, long p) {
  dt_family* handle = nullptr;
  if (spec == "run3") {
    check(dt_family_span3(p, &handle));
    return Family(handle);
  }
  if (spec == "runw") {
    check(dt_family_running_weighted(p, &handle));
    return Family(handle);
  }
  if (spec.rfind("pls", 0) == 0) {
    int d = -1;
    double c = 1000.0;
    if (spec.size() > 3) {
      if (spec[3] != ':') {
        std::cerr << "error: bad family spec '" << spec << "'\n";
        std::exit(kExitInputError);
      }
      std::stringstream options(spec.substr(4));
      std::string item;
      while (std::getline(options, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
          std::cerr << "error: bad family option '" << item << "' in '"
                    << spec << "'\n";
          std::exit(kExitInputError);
        }
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        try {
          if (key == "d") {
            d = std::stoi(value);
          } else if (key == "c") {
            c = std::stod(value);
          } else {
            std::cerr << "error: unknown family option '" << key << "'\n";
            std::exit(kExitInputError);
          }
        } catch (const std::exception&) {
          std::cerr << "error: bad value for family option '" << key << "'\n";
          std::exit(kExitInputError);
        }
      }
    }
    if (d < 1) {
      std::cerr << "error: family '" << spec << "' needs d>=1 (e.g. pls:d=2)\n";
      std::exit(kExitInputError);
    }
    check(dt_family_pls(p, d, c, &handle));
    return Family(handle);
  }
  std::cerr << "error: unknown family '" << spec
            << "' (expected pls:d=..[,c=..], run3 or runw)\n";
  std::exit(kExitInputError);
}

Dataset load_input(const std::string& path, bool degrees) {
  dt_dataset* handle = nullptr;
  char* warnings = nullptr;
  check(dt_dataset_from_csv_file(path.c_str(), degrees ? 1 : 0, &handle,
                                 &warnings));
  if (warnings) {
    std::cerr << "warning: " << warnings << "\n";
    dt_string_free(warnings);
  }
  return Dataset(handle);
}

std::string render_plot(const dt_dataset* data, const dt_dataset* fitted,
                        const char* fit_label, int width, int height,
                        bool connect) {
  dt_plot* plot_handle = nullptr;
  check(dt_plot_new(width, height, connect ? 1 : 0, &plot_handle));
  Plot plot(plot_handle);
  check(dt_plot_add_series(plot.get(), "data", data));
  if (fitted) check(dt_plot_add_series(plot.get(), fit_label, fitted));
  char* svg = nullptr;
  check(dt_plot_render(plot.get(), &svg));
  CString owned(svg);
  return std::string(owned.get());
}

struct CommonFitOptions {
  std::string input;
  bool degrees = false;
  std::vector<std::string> family_specs;
  int grid = 201;
  bool refine = false;
  std::string out = ".";
};

void add_fit_options(CLI::App* cmd, CommonFitOptions& options) {
  cmd->add_option("--input", options.input, "input CSV file")->required();
  cmd->add_flag("--degrees", options.degrees,
                "input columns are time,lat,lon in degrees");
  cmd->add_option("--family", options.family_specs,
                  "candidate family (pls:d=2,c=1000 | pls:d=1 | run3 | runw); "
                  "repeatable")
      ->required();
  cmd->add_option("--grid", options.grid, "grid points per parameter axis");
  cmd->add_flag("--refine", options.refine,
                "golden-section refinement around the best grid point");
  cmd->add_option("--out", options.out, "output directory");
}

Report run_table(const CommonFitOptions& options, const Dataset& data,
                 Dataset* fitted) {
  std::vector<Family> families;
  std::vector<const dt_family*> raw;
  const long p = dt_dataset_rows(data.get());
  for (const auto& spec : options.family_specs) {
    families.push_back(parse_family(spec, p));
    raw.push_back(families.back().get());
  }
  dt_selection_config config{options.grid, options.refine ? 1 : 0, 0.0};
  dt_report* report = nullptr;
  if (fitted) {
    dt_dataset* fit_handle = nullptr;
    check(dt_fit(data.get(), raw.data(), static_cast<long>(raw.size()),
                 &config, &report, &fit_handle));
    fitted->reset(fit_handle);
  } else {
    check(dt_risk_table(data.get(), raw.data(), static_cast<long>(raw.size()),
                        &config, &report));
  }
  return Report(report);
}

std::string dataset_csv(const dt_dataset* ds, bool degrees) {
  char* text = nullptr;
  check(dt_dataset_to_csv(ds, degrees ? 1 : 0, &text));
  CString owned(text);
  return std::string(owned.get());
}

std::string report_json(const dt_report* report) {
  char* text = nullptr;
  check(dt_report_to_json(report, &text));
  CString owned(text);
  return std::string(owned.get());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dirtrend: directional trend estimation on the sphere"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dt_version()));

  CommonFitOptions fit_options;
  auto* fit_cmd = app.add_subcommand(
      "fit", "select the best smoother and write report, fit and plot");
  add_fit_options(fit_cmd, fit_options);

  CommonFitOptions risks_options;
  auto* risks_cmd =
      app.add_subcommand("risks", "estimated-risk table only (report.json)");
  add_fit_options(risks_cmd, risks_options);

  std::string sim_trend;
  std::string sim_trend_file;
  long sim_p = 150;
  double sim_kappa = 200.0;
  std::uint64_t sim_seed = 1;
  std::string sim_out = ".";
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "generate a synthetic data set (data.csv, truth.csv)");
  simulate_cmd->add_option("--trend", sim_trend,
                           "built-in trend: wobble | bat | jumps");
  simulate_cmd->add_option("--trend-file", sim_trend_file,
                           "JSON trend definition file");
  simulate_cmd->add_option("--p", sim_p, "number of observations");
  simulate_cmd->add_option("--kappa", sim_kappa, "Fisher-Langevin precision");
  simulate_cmd->add_option("--seed", sim_seed, "random seed");
  simulate_cmd->add_option("--out", sim_out, "output directory");

  std::string plot_input;
  bool plot_degrees = false;
  std::string plot_fitted;
  int plot_width = 640;
  int plot_height = 640;
  bool plot_no_connect = false;
  std::string plot_out = ".";
  auto* plot_cmd =
      app.add_subcommand("plot", "Lambert plot of a data set (plot.svg)");
  plot_cmd->add_option("--input", plot_input, "input CSV file")->required();
  plot_cmd->add_flag("--degrees", plot_degrees,
                     "input columns are time,lat,lon in degrees");
  plot_cmd->add_option("--fitted", plot_fitted,
                       "fitted-direction CSV to overlay");
  plot_cmd->add_option("--width", plot_width, "canvas width in pixels");
  plot_cmd->add_option("--height", plot_height, "canvas height in pixels");
  plot_cmd->add_flag("--no-connect", plot_no_connect,
                     "do not join time-adjacent points");
  plot_cmd->add_option("--out", plot_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (fit_cmd->parsed()) {
    const auto dir = prepare_out_dir(fit_options.out);
    Dataset data = load_input(fit_options.input, fit_options.degrees);
    Dataset fitted;
    Report report = run_table(fit_options, data, &fitted);
    write_file(dir / "report.json", report_json(report.get()));
    write_file(dir / "fitted.csv", dataset_csv(fitted.get(), false));
    const std::string winner = dt_report_ranking_label(report.get(), 0);
    const std::string fit_label = "fit: " + winner;
    write_file(dir / "plot.svg",
               render_plot(data.get(), fitted.get(), fit_label.c_str(), 640,
                           640, true));
    return kExitOk;
  }

  if (risks_cmd->parsed()) {
    const auto dir = prepare_out_dir(risks_options.out);
    Dataset data = load_input(risks_options.input, risks_options.degrees);
    Report report = run_table(risks_options, data, nullptr);
    write_file(dir / "report.json", report_json(report.get()));
    return kExitOk;
  }

  if (simulate_cmd->parsed()) {
    if (sim_trend.empty() == sim_trend_file.empty()) {
      std::cerr << "error: simulate needs exactly one of --trend or "
                   "--trend-file\n";
      return kExitInputError;
    }
    const auto dir = prepare_out_dir(sim_out);
    dt_trend* trend_handle = nullptr;
    if (!sim_trend.empty()) {
      check(dt_trend_builtin(sim_trend.c_str(), &trend_handle));
    } else {
      const std::string text = read_file(sim_trend_file);
      check(dt_trend_from_json(text.c_str(), &trend_handle));
    }
    Trend trend(trend_handle);
    dt_dataset* data_handle = nullptr;
    dt_dataset* truth_handle = nullptr;
    double lambda = 0.0;
    double gamma2 = 0.0;
    check(dt_simulate(trend.get(), sim_p, sim_kappa, sim_seed, &data_handle,
                      &truth_handle, &lambda, &gamma2));
    Dataset data(data_handle);
    Dataset truth(truth_handle);
    write_file(dir / "data.csv", dataset_csv(data.get(), false));
    write_file(dir / "truth.csv", dataset_csv(truth.get(), false));

    nlohmann::ordered_json meta;
    meta["software"] = {{"name", "dirtrend"}, {"version", dt_version()}};
    meta["trend"] = sim_trend.empty() ? sim_trend_file : sim_trend;
    meta["p"] = sim_p;
    meta["kappa"] = sim_kappa;
    meta["seed"] = sim_seed;
    meta["noise"] = {{"lambda", lambda},
                     {"gamma2", gamma2},
                     {"moments_source", "cached 1e6-draw Monte Carlo"}};
    meta["rng"] = "xoshiro256++ seeded via splitmix64";
    meta["angle_convention"] =
        "trend formulas are canonicalized: colatitude reduced to [0, pi] "
        "(negative values flip the longitude by pi), longitude wrapped to "
        "[0, 2*pi)";
    write_file(dir / "meta.json", meta.dump(2) + "\n");
    return kExitOk;
  }

  if (plot_cmd->parsed()) {
    const auto dir = prepare_out_dir(plot_out);
    Dataset data = load_input(plot_input, plot_degrees);
    Dataset fitted;
    if (!plot_fitted.empty()) {
      fitted = load_input(plot_fitted, false);
    }
    write_file(dir / "plot.svg",
               render_plot(data.get(), fitted.get(), "fit", plot_width,
                           plot_height, !plot_no_connect));
    return kExitOk;
  }

  return kExitInputError;
}
