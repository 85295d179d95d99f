#pragma once

#include <cstdint>
#include <random>

namespace banff {

/// SplitMix64 output function.
std::uint64_t splitmix64_mix(std::uint64_t z);

/// Independent child seed: splitmix64_mix(seed + (stream + 1) * 0x9E3779B97F4A7C15).
/// Used for per-trial seeds (stream = trial index) and per-step sub-streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded generator with distributions defined here rather than by the
/// standard library, whose distribution algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n);
    /// Integer in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi);
    bool bernoulli(double p) { return uniform() < p; }
    /// Standard normal via Box-Muller (cosine branch only).
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace banff
