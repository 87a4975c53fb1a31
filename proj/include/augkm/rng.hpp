#pragma once

#include <cstdint>
#include <random>

namespace augkm {

/// Seedable 64-bit generator used by every stochastic operation.
///
/// The engine is MT19937-64 (std::mt19937_64), whose output sequence is fixed
/// by the C++ standard. The derived draws below are spelled out instead of
/// using std::*_distribution, whose algorithms vary between standard
/// libraries:
///   uniform()   -> (next() >> 11) * 2^-53, in [0, 1)
///   below(n)    -> rejection sampling on next() against the largest
///                  multiple of n, then modulo
///   normal()    -> Box-Muller, one value per pair of uniforms (no caching)
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    double normal();

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Stateless per-cell seed derivation: the result depends only on the inputs,
/// so cells of an experiment grid never share a stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

}  // namespace augkm
