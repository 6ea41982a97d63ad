#pragma once

namespace changeauc {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace changeauc
