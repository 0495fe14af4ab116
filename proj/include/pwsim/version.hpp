#pragma once

namespace pwsim {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace pwsim
