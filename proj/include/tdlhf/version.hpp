#pragma once

namespace tdlhf {

inline constexpr const char *kVersion = "1.0.0";

} // namespace tdlhf
