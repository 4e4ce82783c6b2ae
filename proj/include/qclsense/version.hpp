#pragma once

namespace qclsense {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qclsense
