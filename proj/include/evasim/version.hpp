#pragma once

namespace evasim {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace evasim
