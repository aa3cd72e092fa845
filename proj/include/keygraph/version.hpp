#pragma once

namespace keygraph {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace keygraph
