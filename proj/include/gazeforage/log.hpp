#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace gazeforage {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

// Level comes from GAZEFORAGE_LOG (error|warn|info|debug); default warn.
inline LogLevel log_threshold() {
    static const LogLevel level = [] {
        const char* env = std::getenv("GAZEFORAGE_LOG");
        if (!env) return LogLevel::warn;
        const std::string_view v(env);
        if (v == "error") return LogLevel::error;
        if (v == "warn") return LogLevel::warn;
        if (v == "info") return LogLevel::info;
        if (v == "debug") return LogLevel::debug;
        return LogLevel::warn;
    }();
    return level;
}

inline void log(LogLevel level, std::string_view msg) {
    if (level > log_threshold()) return;
    constexpr const char* names[] = {"error", "warn", "info", "debug"};
    std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << "\n";
}

inline void log_error(std::string_view msg) { log(LogLevel::error, msg); }
inline void log_warn(std::string_view msg) { log(LogLevel::warn, msg); }
inline void log_info(std::string_view msg) { log(LogLevel::info, msg); }
inline void log_debug(std::string_view msg) { log(LogLevel::debug, msg); }

}  // namespace gazeforage
