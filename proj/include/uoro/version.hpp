#pragma once

namespace uoro {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace uoro
