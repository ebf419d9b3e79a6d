#pragma once

namespace containment {

inline constexpr const char* version_string = "containment 0.1.0";

}  // namespace containment
