#pragma once

namespace rollkit {

inline constexpr const char* kVersion = "0.1.0";

} // namespace rollkit
