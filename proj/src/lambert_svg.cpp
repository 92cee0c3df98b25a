#include "lambert_svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "errors.hpp"

namespace dirtrend {

namespace {

const char* kPalette[] = {"#1a1a1a", "#d62728", "#1f77b4",
                          "#2ca02c", "#9467bd", "#8c564b"};
constexpr int kPaletteSize = 6;
constexpr double kMarkerRadius = 3.0;

std::string num(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

void append_marker(std::string& svg, double x, double y, MarkerShape shape,
                   const char* color) {
  switch (shape) {
    case MarkerShape::FilledCircle:
      svg += "  <circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"" +
             num(kMarkerRadius) + "\" fill=\"" + color + "\"/>\n";
      break;
    case MarkerShape::OpenCircle:
      svg += "  <circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"" +
             num(kMarkerRadius) + "\" fill=\"none\" stroke=\"" + color +
             "\"/>\n";
      break;
    case MarkerShape::OpenCross: {
      const double r = kMarkerRadius;
      svg += "  <path d=\"M " + num(x - r) + " " + num(y - r) + " L " +
             num(x + r) + " " + num(y + r) + " M " + num(x - r) + " " +
             num(y + r) + " L " + num(x + r) + " " + num(y - r) +
             "\" stroke=\"" + color + "\" fill=\"none\"/>\n";
      break;
    }
  }
}

}  // namespace

std::string render_lambert_svg(const PlotSpec& spec) {
  if (spec.series.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "render_lambert_svg: no series to plot");
  }
  if (spec.width_px < 64 || spec.height_px < 64) {
    throw Error(ErrorCode::InvalidArgument,
                "render_lambert_svg: canvas too small");
  }

  const double cx = spec.width_px / 2.0;
  const double cy = spec.height_px / 2.0;
  const double extent = std::min(spec.width_px, spec.height_px);
  const double disk_radius = extent / 2.0 - 0.05 * extent;
  const double scale = disk_radius / std::sqrt(2.0);

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(spec.width_px) + "\" height=\"" +
         std::to_string(spec.height_px) + "\" viewBox=\"0 0 " +
         std::to_string(spec.width_px) + " " + std::to_string(spec.height_px) +
         "\">\n";
  svg += "  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  // Disk boundary: the equator of the projected hemisphere.
  svg += "  <circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" +
         num(disk_radius) + "\" fill=\"none\" stroke=\"#888888\"/>\n";

  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const auto& series = spec.series[s];
    const char* color = kPalette[s % kPaletteSize];

    std::vector<std::pair<double, double>> pixels;
    std::vector<bool> norths;
    pixels.reserve(series.points.size());
    for (const auto& point : series.points) {
      const LambertPoint lp = lambert_project(point);
      pixels.emplace_back(cx + lp.u * scale, cy - lp.v * scale);
      norths.push_back(lp.north);
    }

    if (spec.connect && pixels.size() >= 2) {
      svg += "  <polyline fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"1\" points=\"";
      for (std::size_t i = 0; i < pixels.size(); ++i) {
        if (i > 0) svg += " ";
        svg += num(pixels[i].first) + "," + num(pixels[i].second);
      }
      svg += "\"/>\n";
    }
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      append_marker(svg, pixels[i].first, pixels[i].second,
                    norths[i] ? spec.north_symbol : spec.south_symbol, color);
    }
    // Legend entry.
    const double ly = 16.0 + 16.0 * static_cast<double>(s);
    svg += "  <text x=\"8\" y=\"" + num(ly) + "\" font-size=\"12\" fill=\"" +
           color + "\">" + xml_escape(series.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace dirtrend
