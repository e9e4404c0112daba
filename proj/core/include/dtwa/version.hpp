#pragma once

namespace dtwa {

inline constexpr const char* kVersion = "dtwa 0.1.0";

}  // namespace dtwa
