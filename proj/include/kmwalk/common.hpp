#pragma once

namespace kmwalk {

inline constexpr const char* version = "1.0.0";

}  // namespace kmwalk
