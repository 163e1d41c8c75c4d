#pragma once

namespace sospopt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sospopt
