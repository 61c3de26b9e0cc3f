#pragma once

// Deterministic, portable random number generation.
//
// Every stochastic draw in this project comes from SplitMix64. The generator
// and all sampling routines are fully specified here -- no standard-library
// distributions -- so a given 64-bit seed produces identical streams on every
// platform and compiler. Substreams are derived by hashing a (seed, tags...)
// tuple with the SplitMix64 finalizer, which makes draws for independent
// cells (for example one stream per station-minute) order-independent:
// generation can be reordered or parallelized without changing the output.

#include <cmath>
#include <cstdint>

#include "bebsim/errors.hpp"

namespace bebsim {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    // SplitMix64 finalizer, also used as the substream hash.
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    // Independent stream for a tagged cell, e.g. substream(seed, station, minute).
    static SplitMix64 substream(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
        std::uint64_t h = mix(seed);
        h = mix(h ^ a);
        h = mix(h ^ b);
        h = mix(h ^ c);
        return SplitMix64(h);
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

    // Unbiased integer in [0, bound), bound > 0, by rejection.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound; // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Poisson sample via Knuth's product-of-uniforms method. Large rates are
    // split into chunks (Poisson(a+b) = Poisson(a) + Poisson(b)) so the
    // exp(-lambda) factor stays well inside double range. Exact for any
    // finite lambda >= 0; cost is O(lambda) uniforms.
    std::uint64_t poisson(double lambda) {
        if (!(lambda >= 0.0) || !std::isfinite(lambda))
            throw ValidationError("poisson: lambda must be finite and >= 0");
        std::uint64_t total = 0;
        while (lambda > 0.0) {
            const double chunk = lambda > 16.0 ? 16.0 : lambda;
            const double limit = std::exp(-chunk);
            std::uint64_t k = 0;
            double prod = 1.0;
            do {
                ++k;
                prod *= next_double();
            } while (prod > limit);
            total += k - 1;
            lambda -= chunk;
        }
        return total;
    }

private:
    std::uint64_t state_;
};

} // namespace bebsim
