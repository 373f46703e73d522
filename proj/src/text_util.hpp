#pragma once

// Internal helpers for the text formats (field snapshots, CSV series).

#include "ksm/error.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

namespace ksm::detail {

/// 17 significant digits: enough to round-trip any double.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_double(const std::string& s) {
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(begin, &end);
    while (end && (*end == ' ' || *end == '\r' || *end == '\t')) ++end;
    if (end == begin || (end && *end != '\0') || (errno == ERANGE && std::abs(x) > 1.0)) {
        throw ValidationError("cannot parse number '" + s + "'");
    }
    return x;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

}  // namespace ksm::detail
