#pragma once

namespace lrt {

inline constexpr const char* kVersion = "0.1.0";

}
