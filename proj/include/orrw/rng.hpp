#pragma once

#include <cstdint>

#include "orrw/detail/hash.hpp"

namespace orrw {

// Splittable counter-style generator: each (seed, stream) pair yields an
// independent, reproducible sequence. Identical (seed, stream) means an
// identical draw sequence regardless of which thread runs the replica.
//
// The scheme is the SplittableRandom construction: a per-stream odd
// increment ("gamma") advances a counter whose mixed value is the output.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : state_(detail::mix64(seed ^ 0x2545f4914f6cdd1dULL) + stream * 0x9e3779b97f4a7c15ULL),
          gamma_(derive_gamma(stream)) {}

    std::uint64_t next_u64() noexcept {
        state_ += gamma_;
        return detail::mix64(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound); bound must be positive.
    // Multiply-shift with rejection (unbiased, platform independent).
    std::uint64_t below(std::uint64_t bound) noexcept {
        while (true) {
            std::uint64_t x = next_u64();
            unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
            std::uint64_t lo = static_cast<std::uint64_t>(m);
            if (lo >= bound || lo >= (0ULL - bound) % bound)
                return static_cast<std::uint64_t>(m >> 64);
        }
    }

    bool bernoulli(double p) noexcept { return next_double() < p; }

private:
    static std::uint64_t derive_gamma(std::uint64_t stream) noexcept {
        // Any odd constant works; mixing the stream id decorrelates streams.
        std::uint64_t g = detail::mix64(stream * 2 + 1) | 1ULL;
        return g;
    }

    std::uint64_t state_;
    std::uint64_t gamma_;
};

// Picks an index in [0, n) with probability weights[i] / sum(weights).
// Integer weights keep the transition law exact for rational reinforcement.
template <typename GetWeight>
inline unsigned sample_weighted(RngStream& rng, unsigned n, std::uint64_t total,
                                GetWeight&& weight_of) noexcept {
    std::uint64_t r = rng.below(total);
    for (unsigned i = 0; i + 1 < n; ++i) {
        std::uint64_t w = weight_of(i);
        if (r < w) return i;
        r -= w;
    }
    return n - 1;
}

} // namespace orrw
