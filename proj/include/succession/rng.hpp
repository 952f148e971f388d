#pragma once

#include "succession/rational.hpp"

#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace succession {

// Generator identifier recorded in simulator output metadata, so other
// implementations can reproduce streams or explicitly declare divergence.
inline constexpr std::string_view kGeneratorId = "splitmix64";

// splitmix64: a counter-based 64-bit generator. The state advances by a
// fixed increment and each output is a bijective mix of the state, so the
// i-th output of a stream is computable in O(1).
class SplitMix64 {
public:
    static constexpr std::uint64_t kIncrement = 0x9e3779b97f4a7c15ULL;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += kIncrement);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // i-th output of the stream seeded with `seed`. Used to derive
    // independent per-replication sub-seeds.
    static std::uint64_t at(std::uint64_t seed, std::uint64_t index) noexcept {
        return SplitMix64(seed + index * kIncrement).next();
    }

    // Unbiased draw from [0, bound) via rejection.
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound == 0) throw std::domain_error("uniform_below: zero bound");
        const std::uint64_t threshold = (0 - bound) % bound;
        std::uint64_t x = next();
        while (x < threshold) x = next();
        return x % bound;
    }

    // Unbiased draw from [0, bound) for arbitrary-precision bounds.
    Integer uniform_below(const Integer& bound) {
        if (bound <= 0) throw std::domain_error("uniform_below: non-positive bound");
        const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
        const std::size_t words = (bits + 63) / 64;
        const std::size_t excess = words * 64 - bits;
        for (;;) {
            Integer x = 0;
            for (std::size_t w = 0; w < words; ++w) {
                x <<= 64;
                x += Integer(static_cast<unsigned long>(next()));
            }
            x >>= excess;
            if (x < bound) return x;
        }
    }

    // Exact Bernoulli draw: probability is consumed as a rational, never a double.
    bool bernoulli(const Rational& probability) {
        if (sgn(probability) < 0 || probability > 1) {
            throw std::domain_error("bernoulli: probability outside [0, 1]");
        }
        if (sgn(probability) == 0) return false;
        if (probability == 1) return true;
        return uniform_below(Integer(probability.get_den())) < probability.get_num();
    }

private:
    std::uint64_t state_;
};

} // namespace succession
