#pragma once

namespace pyrtex {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pyrtex
