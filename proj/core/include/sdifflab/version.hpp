#pragma once

namespace sdifflab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sdifflab
