#pragma once

namespace more {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace more
