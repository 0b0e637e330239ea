#pragma once

#include <cstdio>
#include <string>

namespace hdde::detail {

// Round-trip formatting: 17 significant digits.
inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace hdde::detail
