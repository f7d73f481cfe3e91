#pragma once

namespace oscindex {

inline constexpr const char* kToolName = "oscindex";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace oscindex
