#pragma once

namespace ratedist {

inline constexpr const char* version = "0.1.0";

}  // namespace ratedist
