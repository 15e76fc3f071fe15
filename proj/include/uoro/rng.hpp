#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "uoro/linalg.hpp"

namespace uoro {

// Counter-based deterministic generator (splitmix64 finalizer over
// seed + counter). Integer arithmetic only, so the same seed yields the
// same stream on every platform and in any reimplementation.
struct SignRng {
    std::uint64_t seed = 0;
    std::uint64_t counter = 0;

    SignRng() = default;
    explicit SignRng(std::uint64_t s) : seed(s) {}

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t counter) {
        std::uint64_t z = seed + counter * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return mix(seed, ++counter); }

    // Exactly +1.0 or -1.0, each with probability 1/2.
    double next_sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

    // Uniform in [0, 1), 53-bit mantissa.
    double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [-r, r].
    double next_symmetric(double r) { return (2.0 * next_unit() - 1.0) * r; }

    // Uniform integer in [0, n). Modulo bias is < 2^-53 for the alphabet
    // sizes used here.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    // Independent stream derived from this seed; used to give each
    // record of a task stream its own generator.
    static SignRng substream(std::uint64_t seed, std::uint64_t stream_id) {
        return SignRng(mix(seed, 0x5851F42D4C957F2DULL + stream_id));
    }
};

inline Vec draw_signs(SignRng& rng, std::size_t n) {
    if (n < 1) throw std::invalid_argument("draw_signs: n must be >= 1");
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = rng.next_sign();
    return out;
}

// All 2^n sign assignments, each exactly once. Bit i of the index maps to
// entry i, so the ordering is stable and enumerable by tests.
inline std::vector<Vec> enumerate_signs(std::size_t n) {
    if (n > 16) throw std::invalid_argument("enumerate_signs: n > 16");
    const std::size_t count = std::size_t(1) << n;
    std::vector<Vec> out;
    out.reserve(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
        Vec v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = (mask >> i) & 1 ? 1.0 : -1.0;
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace uoro
