#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string_view>

namespace foldtrace {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

/// Threshold read once from FOLDTRACE_LOG (error|info|debug); defaults to error.
inline LogLevel log_threshold() {
    static const LogLevel level = [] {
        const char* env = std::getenv("FOLDTRACE_LOG");
        if (env == nullptr) {
            return LogLevel::Error;
        }
        std::string_view v{env};
        if (v == "debug") {
            return LogLevel::Debug;
        }
        if (v == "info") {
            return LogLevel::Info;
        }
        return LogLevel::Error;
    }();
    return level;
}

inline bool log_enabled(LogLevel level) { return static_cast<int>(level) <= static_cast<int>(log_threshold()); }

template <class... Args>
void log(LogLevel level, const Args&... args) {
    if (!log_enabled(level)) {
        return;
    }
    std::ostringstream os;
    os.precision(17);
    os << "[foldtrace] ";
    (os << ... << args);
    os << '\n';
    std::cerr << os.str();
}

}  // namespace foldtrace
