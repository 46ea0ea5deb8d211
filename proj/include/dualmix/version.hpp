#pragma once

namespace dualmix {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dualmix
