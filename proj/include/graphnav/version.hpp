#pragma once

namespace graphnav {
inline constexpr const char* kVersion = "0.1.0";
}
