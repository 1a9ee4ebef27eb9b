#pragma once

namespace damcmc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace damcmc
