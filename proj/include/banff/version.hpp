#pragma once

#include <string_view>

namespace banff {

#ifdef BANFF_VERSION
inline constexpr std::string_view kToolVersion = BANFF_VERSION;
#else
inline constexpr std::string_view kToolVersion = "0.0.0";
#endif

inline constexpr std::string_view kToolName = "banff";

}  // namespace banff
