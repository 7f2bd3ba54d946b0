#pragma once

namespace edl {

inline constexpr const char* kVersion = "0.1.0";

}
