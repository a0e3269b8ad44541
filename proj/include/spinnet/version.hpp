#pragma once

namespace spinnet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spinnet
