#include <cstdlib>
#include <fstream>
#include <iostream>

#include "logdqn/errors.hpp"
#include "logdqn/hashing.hpp"
#include "logdqn/logging.hpp"

namespace logdqn {

namespace {

LogLevel parse_level(const char* value) {
    if (value == nullptr) return LogLevel::Info;
    const std::string v(value);
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
    return "info";
}

}  // namespace

LogLevel log_threshold() {
    static const LogLevel threshold = parse_level(std::getenv("LOGDQN_LOG_LEVEL"));
    return threshold;
}

void log_message(LogLevel level, const std::string& msg) {
    if (static_cast<int>(level) > static_cast<int>(log_threshold())) return;
    std::cerr << '[' << level_tag(level) << "] " << msg << '\n';
}

std::string to_hex(std::uint64_t value) {
    static const char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

std::string file_digest_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open `" + path + "` for digesting");
    std::uint64_t h = kFnvOffsetBasis;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[static_cast<std::size_t>(i)]);
            h *= kFnvPrime;
        }
    }
    return to_hex(h);
}

}  // namespace logdqn
