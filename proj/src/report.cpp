#include "report.hpp"

#include <json.hpp>

#include "version.hpp"

namespace dirtrend {

std::string report_to_json(const RiskReport& report) {
  nlohmann::ordered_json doc;
  doc["software"] = {{"name", "dirtrend"}, {"version", kVersion}};
  doc["gamma2_hat"] = report.gamma2hat;
  doc["naive_risk"] = report.naive_risk;
  doc["grid"] = {
      {"points_per_axis", report.config.grid_points_per_axis},
      {"resolution",
       1.0 / static_cast<double>(report.config.grid_points_per_axis - 1)},
      {"refine", report.config.refine},
      {"refine_tolerance", report.config.refine_tolerance},
  };
  doc["entries"] = nlohmann::ordered_json::array();
  for (const auto& entry : report.entries) {
    nlohmann::ordered_json e;
    e["label"] = entry.label;
    e["t"] = entry.t;
    e["estimated_risk"] = entry.estimated_risk;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [key, value] : entry.params) params[key] = value;
    e["params"] = params;
    doc["entries"].push_back(e);
  }
  doc["ranking"] = report.ranking;
  return doc.dump(2) + "\n";
}

}  // namespace dirtrend
