#pragma once

namespace critspace {
inline constexpr const char* kVersion = "critspace 1.0.0";
}
