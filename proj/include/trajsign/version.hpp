#pragma once

namespace trajsign {

inline constexpr const char* kToolName = "trajsign";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace trajsign
