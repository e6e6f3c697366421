#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace downcite {

/// Seeded RNG with the handful of draws the generator needs. Draw sequences
/// are fixed by construction so a spec+seed pair always replays identically.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        // 53-bit mantissa; engine output used directly to stay
        // distribution-implementation independent
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi <= lo) return lo;
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(engine_() % span);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Log-normal with unit mean: exp(N(-sigma^2/2, sigma)).
    double lognormal_unit_mean(double sigma) {
        if (sigma <= 0.0) return 1.0;
        return std::exp(normal() * sigma - 0.5 * sigma * sigma);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace downcite
