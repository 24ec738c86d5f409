#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace traderbench {

/// Portable seeded generator. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the floating-point and integer
/// conversions below are written out by hand because the standard
/// distributions are implementation-defined.
///
/// Stream splitting: every sub-effect (noise, spikes, site selection, ...)
/// draws from its own stream, seeded with
///     splitmix64(seed ^ fnv1a64(stream_name))
/// so adding draws to one effect never shifts another.
class Rng {
public:
    Rng(std::uint64_t seed, std::string_view stream);

    std::uint64_t next_u64() { return engine_(); }

    /// [0, 1) with 53 random bits.
    double uniform();

    /// Unbiased integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    /// Box-Muller, cosine branch only: exactly two uniforms per draw.
    double normal(double mean = 0.0, double stddev = 1.0);

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view text) noexcept;

}  // namespace traderbench
