#pragma once

#include <cstdint>
#include <cstddef>

namespace stylecloak::ndgrad {

/// xoshiro256++ seeded through splitmix64. Self-contained so that streams
/// are bit-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform in [0, 1).
    double uniform();
    /// Uniform in [a, b).
    double uniform(double a, double b);
    /// Standard normal via Box-Muller.
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }
    /// Uniform integer in [0, n). n must be > 0.
    std::size_t uniform_index(std::size_t n);

    /// Mixes a stream id into a seed; used to derive independent per-scene
    /// or per-item streams from one global seed.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

private:
    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace stylecloak::ndgrad
