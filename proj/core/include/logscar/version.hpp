#pragma once

namespace logscar {

inline constexpr const char* kVersion = "0.1.0";

} // namespace logscar
