#pragma once

namespace evade {

inline constexpr const char* kVersion = "0.1.0";

} // namespace evade
