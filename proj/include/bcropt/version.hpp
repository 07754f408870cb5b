#pragma once

namespace bcropt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bcropt
