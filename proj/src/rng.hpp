#pragma once

// Portable seeded randomness. std::mt19937_64 output is fully specified by the
// standard; the std distributions are not, so values are mapped by hand.

#include <cstdint>
#include <random>

namespace chaoslink::detail {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Uniform in [-mag, mag).
    double symmetric(double mag) { return (2.0 * uniform01() - 1.0) * mag; }

    /// Uniform integer in [0, n) by rejection, n > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = engine_();
        while (v >= limit) {
            v = engine_();
        }
        return v % n;
    }

  private:
    std::mt19937_64 engine_;
};

/// Independent stream for channel impairments derived from the source seed.
inline std::uint64_t channel_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ull; }

} // namespace chaoslink::detail
