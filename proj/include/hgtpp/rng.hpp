#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hgtpp {

/// Seeded generator used for every stochastic step (initialization, sampling,
/// simulation). Streams are derived with split() so independent consumers
/// never share a sequence. Distributions are implemented here rather than via
/// <random> distribution objects so draws are identical across standard
/// library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(mix(seed)) {}

    std::uint64_t seed() const noexcept { return seed_; }

    /// Child generator for stream `id`; deterministic in (seed, id).
    Rng split(std::uint64_t id) const { return Rng(mix(seed_ ^ mix(id + 0x9e3779b97f4a7c15ULL))); }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // rejection keeps the draw unbiased
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Exponential with the given rate.
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace hgtpp
