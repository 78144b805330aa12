#pragma once

namespace orbit {

inline constexpr const char* kVersion = "0.1.0";

} // namespace orbit
