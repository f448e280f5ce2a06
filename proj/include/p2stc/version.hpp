#pragma once

namespace p2stc {
inline constexpr const char* kVersion = "0.1.0";
}
