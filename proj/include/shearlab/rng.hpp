// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace shear {

/// SplitMix64 (Steele, Lea & Flood 2014): 64-bit state, additive Weyl
/// sequence followed by a 3-step xor-shift-multiply finalizer.
///
/// Used for every random ensemble in the library. The conversions below are
/// written out explicitly because the <random> distributions are not
/// guaranteed to produce identical streams across standard libraries.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal by Box-Muller (one value per call, the sine branch is dropped).
    double normal()
    {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::complex<double> complex_normal() { return {normal(), normal()}; }

    /// Derive an independent stream for member `index` of an ensemble.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index)
    {
        SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
        return SplitMix64(mix.next());
    }

private:
    std::uint64_t state_;
};

inline std::vector<std::complex<double>> random_complex_vector(std::size_t n, SplitMix64& rng)
{
    std::vector<std::complex<double>> g(n);
    for (auto& x : g) x = rng.complex_normal();
    return g;
}

} // namespace shear
