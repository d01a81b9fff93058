#pragma once

namespace mather {
inline constexpr const char* kVersion = "0.1.0";
}
