#pragma once

namespace cptk {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cptk
