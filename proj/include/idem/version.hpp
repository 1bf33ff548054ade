#pragma once

namespace idem {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace idem
