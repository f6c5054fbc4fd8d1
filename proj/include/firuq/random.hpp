#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace firuq {

/// Deterministic 64-bit stream. Uniform variates are derived from the raw
/// engine output with explicit bit manipulation instead of
/// std::uniform_real_distribution, whose algorithm is implementation-defined.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) {
        std::seed_seq seq{lo(seed), hi(seed)};
        engine_.seed(seq);
    }

    /// Child stream for one unit of work (a trial, a block). Streams keyed by
    /// different `key` values are statistically independent and do not depend
    /// on the order in which they are created.
    static RandomStream keyed(std::uint64_t seed, std::uint64_t key) {
        RandomStream stream;
        std::seed_seq seq{lo(seed), hi(seed), 0x6b657965u, lo(key), hi(key)};
        stream.engine_.seed(seq);
        return stream;
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1): 52 random bits centred in their
    /// cell, so neither endpoint can be produced.
    double uniform_open() {
        return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
    }

    /// Uniform on (-width/2, width/2).
    double centered(double width) {
        const double v = (uniform_open() - 0.5) * width;
        // the product can round onto the endpoint for widths that are not powers of two
        if (std::fabs(v) >= 0.5 * width) return std::nextafter(v, 0.0);
        return v;
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    RandomStream() = default;

    static std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
    static std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

    std::mt19937_64 engine_;
};

}  // namespace firuq
