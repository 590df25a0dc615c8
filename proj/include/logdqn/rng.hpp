#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "logdqn/errors.hpp"
#include "logdqn/hashing.hpp"

namespace logdqn {

/// Deterministic random source. Wraps mt19937_64 but derives all variates
/// through fixed arithmetic instead of std:: distributions, whose output is
/// implementation-defined. Two builds with the same seed produce the same
/// stream on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw ContractViolation("Rng::below: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    bool bernoulli(double p) { return uniform() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

    /// k distinct indices drawn uniformly from [0, n), in draw order.
    /// Partial Fisher-Yates over a scratch vector supplied by the caller so
    /// repeated draws do not reallocate.
    void sample_indices(std::size_t n, std::size_t k, std::vector<std::size_t>& scratch,
                        std::vector<std::size_t>& out) {
        if (k > n) throw ContractViolation("Rng::sample_indices: k exceeds n");
        scratch.resize(n);
        for (std::size_t i = 0; i < n; ++i) scratch[i] = i;
        out.resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + index(n - i);
            std::swap(scratch[i], scratch[j]);
            out[i] = scratch[i];
        }
    }

private:
    std::mt19937_64 gen_;
};

/// Named sub-seed so every pipeline stage owns an independent stream derived
/// from the single run seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view stage) {
    return splitmix64(base ^ fnv1a64(stage));
}

}  // namespace logdqn
