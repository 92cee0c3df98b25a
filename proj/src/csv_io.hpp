#pragma once

#include <string>
#include <vector>

#include "model.hpp"

namespace dirtrend {

/// CSV schema: header "time,theta,phi" with angles in radians, or, with
/// degrees = true, "time,lat,lon" with latitude/longitude in degrees.
struct CsvOptions {
  bool degrees = false;
};

/// Parses directional observations. Rows are sorted ascending by time before
/// fitting (stable, so duplicated time stamps keep their file order and emit
/// a warning). Parse failures carry the 1-based line number.
DirectionData ingest_csv_string(const std::string& text,
                                const CsvOptions& options = {},
                                std::vector<std::string>* warnings = nullptr);

DirectionData ingest_csv_file(const std::string& path,
                              const CsvOptions& options = {},
                              std::vector<std::string>* warnings = nullptr);

/// Serializes directions back to the ingest schema with 12 significant
/// digits, enough for a 1e-9 unit-vector round trip. Rows without times are
/// numbered 1..p.
std::string export_csv(const DirectionData& data,
                       const CsvOptions& options = {});

}  // namespace dirtrend
