#pragma once

namespace chiraldyn {

inline constexpr const char* kVersion = "0.1.0";

} // namespace chiraldyn
