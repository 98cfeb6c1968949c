#pragma once

namespace advscore {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace advscore
