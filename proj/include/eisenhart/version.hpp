#pragma once

namespace eisenhart {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace eisenhart
