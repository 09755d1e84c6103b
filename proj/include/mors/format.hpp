#pragma once

#include <cstdio>
#include <string>

namespace mors {

// Canonical numeric formatting for reports: six significant digits, so
// emitted CSV/JSON is stable enough for golden-file comparison.
inline std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// The same value a reader of our reports would parse back.
inline double round_g6(double v) {
    return std::stod(format_g6(v));
}

} // namespace mors
