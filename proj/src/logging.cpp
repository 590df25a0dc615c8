#include "logdqn/logging.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace logdqn {

namespace {

LogLevel parse_level() {
    const char* env = std::getenv("LOGDQN_LOG_LEVEL");
    if (env == nullptr) return LogLevel::Info;
    const std::string v(env);
    if (v == "error") return LogLevel::Error;
    if (v == "warn") return LogLevel::Warn;
    if (v == "info") return LogLevel::Info;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Info;
}

const char* level_tag(LogLevel level) {
    switch (level) {
        case LogLevel::Error: return "error";
        case LogLevel::Warn: return "warn";
        case LogLevel::Info: return "info";
        case LogLevel::Debug: return "debug";
    }
    return "?";
}

}  // namespace

LogLevel log_threshold() {
    static const LogLevel threshold = parse_level();
    return threshold;
}

void log_message(LogLevel level, const std::string& msg) {
    if (static_cast<int>(level) > static_cast<int>(log_threshold())) return;
    std::cerr << "[logdqn:" << level_tag(level) << "] " << msg << "\n";
}

}  // namespace logdqn
