#pragma once

namespace bebsim {

inline constexpr const char* kVersion = "0.1.0";

} // namespace bebsim
