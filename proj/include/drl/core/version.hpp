#pragma once

#include <string_view>

namespace drl {

inline constexpr std::string_view kCodeVersion = "0.1.0";

}  // namespace drl
