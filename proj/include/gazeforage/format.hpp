#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace gazeforage {

// Shortest decimal form that parses back to the identical double. Used by
// every text emitter so that serialize-then-parse is an exact round trip.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_double(double v, int precision) {
    char buf[48];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, precision);
    return std::string(buf, res.ptr);
}

}  // namespace gazeforage
