#pragma once

namespace optimist {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace optimist
