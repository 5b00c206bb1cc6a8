#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hetnet {

/// Seed scrambler (splitmix64 finalizer). Consecutive seeds map to
/// well-separated engine states.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic random source for snapshot generation.
///
/// Variates are derived from raw mt19937_64 output with explicit formulas
/// rather than <random> distributions, whose algorithms are unspecified and
/// differ between standard libraries. A (seed, stream) pair therefore yields
/// the same sequence on every platform.
class Rng
{
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(mix_seed(seed ^ mix_seed(stream)))
    {
    }

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unit-mean exponential.
    double exponential() { return -std::log1p(-uniform()); }

    /// Poisson variate by multiplication of uniforms. Intended for small
    /// means (the cell loads used here); cost is linear in the mean.
    int poisson(double mean)
    {
        const double limit = std::exp(-mean);
        int k = 0;
        double prod = uniform();
        while (prod > limit)
        {
            ++k;
            prod *= uniform();
        }
        return k;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace hetnet
