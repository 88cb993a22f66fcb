#pragma once

namespace rrc {
inline constexpr const char* kVersion = "0.1.0";
}
