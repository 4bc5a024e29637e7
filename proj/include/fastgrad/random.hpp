#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fastgrad {

/// SplitMix64 generator (Steele, Lea & Flood 2014).
///
/// Chosen because its stream is fully specified by a few lines of integer
/// arithmetic, so generated datasets are identical on every platform and
/// standard library. std::normal_distribution does not give that guarantee.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller. Consumes two draws per call; the
    /// second variate is discarded to keep the stream position simple.
    double normal() noexcept {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// -1 or +1 with equal probability (top bit of one draw).
    double sign() noexcept { return (next() >> 63) ? 1.0 : -1.0; }

private:
    std::uint64_t state_;
};

} // namespace fastgrad
