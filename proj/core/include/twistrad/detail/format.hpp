#pragma once
// Deterministic shortest-round-trip formatting for CSV output.

#include <cstdio>
#include <string>

namespace twistrad::detail {

inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace twistrad::detail
