#pragma once

namespace aoi {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace aoi
