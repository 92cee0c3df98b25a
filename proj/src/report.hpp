#pragma once

#include <string>

#include "selector.hpp"

namespace dirtrend {

/// JSON rendering of a risk table, with the grid configuration and software
/// version included so runs are auditable. Key order is fixed; identical
/// reports serialize to identical bytes.
std::string report_to_json(const RiskReport& report);

}  // namespace dirtrend
