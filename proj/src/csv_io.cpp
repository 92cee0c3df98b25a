#include "csv_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "sphere.hpp"

namespace dirtrend {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kAngleSlack = 1e-9;

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  return s.substr(begin, end - begin);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_number(const std::string& field, long line_no,
                    const char* column) {
  try {
    std::size_t consumed = 0;
    const double value = std::stod(field, &consumed);
    if (consumed != field.size()) {
      throw std::invalid_argument("trailing characters");
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::Parse,
                  "line " + std::to_string(line_no) + ": non-finite " +
                      column + " value",
                  line_no);
    }
    return value;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Parse,
                "line " + std::to_string(line_no) + ": cannot parse " +
                    column + " value '" + field + "'",
                line_no);
  }
}

double wrap_two_pi(double phi) {
  double out = std::fmod(phi, kTwoPi);
  if (out < 0.0) out += kTwoPi;
  if (out >= kTwoPi) out = 0.0;
  return out;
}

}  // namespace

DirectionData ingest_csv_string(const std::string& text,
                                const CsvOptions& options,
                                std::vector<std::string>* warnings) {
  std::stringstream stream(text);
  std::string line;
  long line_no = 0;

  if (!std::getline(stream, line)) {
    throw Error(ErrorCode::Parse, "empty input", 1);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  line_no = 1;
  const auto header = split_fields(line);
  const std::vector<std::string> expected =
      options.degrees ? std::vector<std::string>{"time", "lat", "lon"}
                      : std::vector<std::string>{"time", "theta", "phi"};
  if (header.size() != 3 || lower(header[0]) != expected[0] ||
      lower(header[1]) != expected[1] || lower(header[2]) != expected[2]) {
    throw Error(ErrorCode::Parse,
                "line 1: expected header '" + expected[0] + "," + expected[1] +
                    "," + expected[2] + "'",
                1);
  }

  std::vector<double> times;
  std::vector<SphericalPoint> points;
  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw Error(ErrorCode::Parse,
                  "line " + std::to_string(line_no) + ": expected 3 fields, "
                      "got " + std::to_string(fields.size()),
                  line_no);
    }
    const double time = parse_number(fields[0], line_no, expected[0].c_str());
    const double a1 = parse_number(fields[1], line_no, expected[1].c_str());
    const double a2 = parse_number(fields[2], line_no, expected[2].c_str());

    SphericalPoint point;
    if (options.degrees) {
      if (a1 < -90.0 - kAngleSlack || a1 > 90.0 + kAngleSlack) {
        throw Error(ErrorCode::Parse,
                    "line " + std::to_string(line_no) +
                        ": latitude outside [-90, 90]",
                    line_no);
      }
      point.theta = std::clamp((90.0 - a1) * kDegToRad, 0.0, kPi);
      point.phi = wrap_two_pi(a2 * kDegToRad);
    } else {
      if (a1 < -kAngleSlack || a1 > kPi + kAngleSlack) {
        throw Error(ErrorCode::Parse,
                    "line " + std::to_string(line_no) +
                        ": theta outside [0, pi]",
                    line_no);
      }
      point.theta = std::clamp(a1, 0.0, kPi);
      point.phi = wrap_two_pi(a2);
    }
    times.push_back(time);
    points.push_back(point);
  }

  if (points.size() < 2) {
    throw Error(ErrorCode::Parse,
                "need at least 2 data rows, got " +
                    std::to_string(points.size()));
  }

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return times[a] < times[b];
                   });

  Eigen::MatrixXd Y(static_cast<Eigen::Index>(points.size()), 3);
  Eigen::VectorXd sorted_times(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto src = order[i];
    Y.row(static_cast<Eigen::Index>(i)) = polar_to_cartesian(points[src]);
    sorted_times(static_cast<Eigen::Index>(i)) = times[src];
    if (i > 0 && sorted_times(static_cast<Eigen::Index>(i)) ==
                     sorted_times(static_cast<Eigen::Index>(i - 1))) {
      if (warnings) {
        warnings->push_back("duplicate time stamp " +
                            std::to_string(times[src]) +
                            "; keeping input order");
      }
    }
  }
  return DirectionData(std::move(Y), std::move(sorted_times));
}

DirectionData ingest_csv_file(const std::string& path,
                              const CsvOptions& options,
                              std::vector<std::string>* warnings) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  }
  std::stringstream buffer;
  buffer << file.rdbuf();
  return ingest_csv_string(buffer.str(), options, warnings);
}

std::string export_csv(const DirectionData& data, const CsvOptions& options) {
  std::string out = options.degrees ? "time,lat,lon\n" : "time,theta,phi\n";
  char buf[128];
  for (Eigen::Index i = 0; i < data.p(); ++i) {
    const double time = data.times ? (*data.times)(i)
                                   : static_cast<double>(i + 1);
    const SphericalPoint point = cartesian_to_polar(data.Y.row(i));
    double a1 = point.theta;
    double a2 = point.phi;
    if (options.degrees) {
      a1 = 90.0 - point.theta / kDegToRad;
      a2 = point.phi / kDegToRad;
    }
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", time, a1, a2);
    out += buf;
  }
  return out;
}

}  // namespace dirtrend
