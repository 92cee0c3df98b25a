#pragma once

#include <string>
#include <vector>

#include "sphere.hpp"

namespace dirtrend {

enum class MarkerShape { FilledCircle, OpenCross, OpenCircle };

struct PlotSeries {
  std::string label;
  std::vector<SphericalPoint> points;  // in time order
};

/// Lambert equal-area plot description. Both hemispheres project into the
/// same disk of radius sqrt(2); the marker shape records which one a point
/// came from. `connect` draws a polyline through time-adjacent points of each
/// series.
struct PlotSpec {
  int width_px = 640;
  int height_px = 640;
  MarkerShape north_symbol = MarkerShape::FilledCircle;
  MarkerShape south_symbol = MarkerShape::OpenCross;
  bool connect = true;
  std::vector<PlotSeries> series;
};

/// Deterministic SVG document: same spec, same bytes. The disk boundary (the
/// equator) is drawn, the disk fills the canvas up to a 5% margin. Throws on
/// an empty series list.
std::string render_lambert_svg(const PlotSpec& spec);

}  // namespace dirtrend
