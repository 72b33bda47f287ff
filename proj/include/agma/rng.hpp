#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace agma {

/**
 * Seeded random stream for reproducible simulation.
 *
 * Wraps std::mt19937_64 but hand-rolls the variate transforms
 * (53-bit uniform, Box-Muller gaussian, inverse-CDF Rayleigh) so that
 * a given seed yields the same sample sequence on every platform and
 * standard library. Identical seeds give bit-identical streams.
 */
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    /// Replication stream i of a Monte Carlo run: seed = base + i.
    static RngStream substream(std::uint64_t base_seed, std::uint64_t index) {
        return RngStream(base_seed + index);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; the pair's second value is cached.
    double gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
        double r = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * kPi * u2;
        cached_ = r * std::sin(angle);
        has_cached_ = true;
        return r * std::cos(angle);
    }

    double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

    /// Rayleigh with the given scale, by inverse CDF: x = s*sqrt(-2 ln(1-U)).
    double rayleigh(double scale) {
        double u = uniform01();
        return scale * std::sqrt(-2.0 * std::log1p(-u));
    }

    /// Integer in [0, n), n >= 1. The modulo bias is ~n/2^64, irrelevant here.
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

private:
    static constexpr double kPi = 3.14159265358979323846;

    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace agma
