#pragma once

namespace barriermc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace barriermc
