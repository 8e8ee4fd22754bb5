#pragma once

namespace roughsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace roughsim
