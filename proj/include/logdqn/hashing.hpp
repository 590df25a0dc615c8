#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace logdqn {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// FNV-1a over a byte string. `basis` lets callers derive independent
/// hash families from the same input.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = kFnvOffsetBasis) {
    std::uint64_t h = basis;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= kFnvPrime;
    }
    return h;
}

/// Finalizer from the splitmix64 generator; good avalanche, cheap.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stable 64-bit content digest of a file, rendered as 16 hex chars.
/// Used for run manifests; not a cryptographic hash.
std::string file_digest_hex(const std::string& path);

std::string to_hex(std::uint64_t value);

}  // namespace logdqn
