#pragma once

namespace migplan {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace migplan
