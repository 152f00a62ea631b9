#pragma once

namespace phishkit {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace phishkit
