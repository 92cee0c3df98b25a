#pragma once

namespace dirtrend {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dirtrend
