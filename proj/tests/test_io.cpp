#include <doctest.h>

#include <json.hpp>
#include <numbers>

#include "csv_io.hpp"
#include "lambert_svg.hpp"
#include "report.hpp"
#include "selector.hpp"
#include "synthetic.hpp"
#include "test_support.hpp"

using namespace dirtrend;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("csv ingest in radians, sorted by time") {
  const std::string csv =
      "time,theta,phi\n"
      "3.0,1.0,0.5\n"
      "1.0,0.2,0.1\n"
      "2.0,0.4,6.0\n";
  const DirectionData data = ingest_csv_string(csv);
  REQUIRE(data.p() == 3);
  CHECK((*data.times)(0) == 1.0);
  CHECK((*data.times)(2) == 3.0);
  CHECK((data.Y.row(0) -
         Eigen::RowVector3d(polar_to_cartesian({0.2, 0.1}).transpose()))
            .norm() < 1e-14);
}

TEST_CASE("csv ingest in degrees") {
  const std::string csv =
      "time,lat,lon\n"
      "1.0,90,0\n"
      "2.0,0,180\n";
  CsvOptions options;
  options.degrees = true;
  const DirectionData data = ingest_csv_string(csv, options);
  // latitude 90 is the north pole
  CHECK((data.Y.row(0) - Eigen::RowVector3d(0, 0, 1)).norm() < 1e-12);
  // latitude 0, longitude 180: (-1, 0, 0)
  CHECK((data.Y.row(1) - Eigen::RowVector3d(-1, 0, 0)).norm() < 1e-12);

  const std::string bad_lat = "time,lat,lon\n1,95,0\n2,0,0\n";
  CHECK_THROWS_AS(ingest_csv_string(bad_lat, options), Error);
}

TEST_CASE("csv parse errors carry line numbers") {
  const std::string bad =
      "time,theta,phi\n"
      "1.0, abc, 0\n"
      "2.0, 0.5, 0\n";
  try {
    ingest_csv_string(bad);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  CHECK_THROWS_AS(ingest_csv_string("time,theta,phi\n1,nan,0\n2,1,0\n"),
                  Error);
  CHECK_THROWS_AS(ingest_csv_string("time,wrong,phi\n1,1,0\n2,1,0\n"), Error);
  CHECK_THROWS_AS(ingest_csv_string("time,theta,phi\n1,1\n2,1,0\n"), Error);
}

TEST_CASE("duplicate time stamps warn but keep stable order") {
  const std::string csv =
      "time,theta,phi\n"
      "1.0,0.2,0.0\n"
      "1.0,0.4,0.0\n";
  std::vector<std::string> warnings;
  const DirectionData data = ingest_csv_string(csv, {}, &warnings);
  REQUIRE(warnings.size() == 1);
  // input order preserved
  CHECK(cartesian_to_polar(data.Y.row(0)).theta == doctest::Approx(0.2));
  CHECK(cartesian_to_polar(data.Y.row(1)).theta == doctest::Approx(0.4));
}

TEST_CASE("export then ingest round trip") {
  SimulationConfig config;
  config.p = 60;
  config.kappa = 150.0;
  config.seed = 9;
  const auto sim = generate_dataset(builtin_trend("wobble"), config);

  for (bool degrees : {false, true}) {
    CsvOptions options;
    options.degrees = degrees;
    const std::string text = export_csv(sim.data, options);
    const DirectionData back = ingest_csv_string(text, options);
    REQUIRE(back.p() == sim.data.p());
    CHECK((back.Y - sim.data.Y).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((*back.times - *sim.data.times).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("report json schema and determinism") {
  SimulationConfig config;
  config.p = 40;
  config.kappa = 200.0;
  config.seed = 4;
  const auto sim = generate_dataset(builtin_trend("jumps"), config);
  const auto family = pls_family(40, 1, 1000.0);
  SelectionConfig selection;
  selection.grid_points_per_axis = 41;
  const RiskReport report =
      risk_table({family.get()}, sim.data, selection);

  const std::string text = report_to_json(report);
  CHECK(text == report_to_json(report));  // stable bytes

  const auto doc = nlohmann::json::parse(text);
  CHECK(doc["software"]["name"] == "dirtrend");
  CHECK(doc["gamma2_hat"].get<double>() == report.gamma2hat);
  CHECK(doc["naive_risk"].get<double>() == report.gamma2hat);
  CHECK(doc["grid"]["points_per_axis"] == 41);
  REQUIRE(doc["entries"].size() == 2);
  CHECK(doc["entries"][0]["label"] == family->label());
  CHECK(doc["entries"][0]["params"]["c"] == 1000.0);
  REQUIRE(doc["ranking"].size() == 3);

  // ranking is sorted by the risks it references
  auto risk_of = [&](const std::string& label) -> double {
    if (label == "naive") return doc["naive_risk"].get<double>();
    for (const auto& entry : doc["entries"]) {
      if (entry["label"] == label) return entry["estimated_risk"].get<double>();
    }
    FAIL("label missing");
    return 0.0;
  };
  for (std::size_t i = 1; i < doc["ranking"].size(); ++i) {
    CHECK(risk_of(doc["ranking"][i - 1]) <= risk_of(doc["ranking"][i]));
  }
}

TEST_CASE("lambert svg output") {
  PlotSpec spec;
  spec.width_px = 640;
  spec.height_px = 640;
  PlotSeries series;
  series.label = "data";
  series.points = {{0.0, 0.0}, {kPi / 2, 0.0}, {0.75 * kPi, 1.0}};
  spec.series = {series};

  const std::string svg = render_lambert_svg(spec);
  CHECK(svg == render_lambert_svg(spec));  // deterministic bytes

  // north pole sits at the canvas center, the equator point on the boundary
  CHECK(svg.find("cx=\"320.00\" cy=\"320.00\"") != std::string::npos);
  CHECK(svg.find("cx=\"608.00\" cy=\"320.00\"") != std::string::npos);

  // southern-hemisphere point drawn as an open cross
  CHECK(svg.find("<path d=\"M ") != std::string::npos);

  // adjacent points joined
  CHECK(svg.find("<polyline") != std::string::npos);

  PlotSpec disconnected = spec;
  disconnected.connect = false;
  CHECK(render_lambert_svg(disconnected).find("<polyline") ==
        std::string::npos);

  PlotSpec empty;
  CHECK_THROWS_AS(render_lambert_svg(empty), Error);
}
