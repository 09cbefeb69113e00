#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sdetv {

// SplitMix64 finalizer. Bijective on 64-bit words, good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stateless counter-based random stream.
///
/// Every draw is a pure function of (seed, stream, index), so paths can be
/// generated in any order, on any number of threads, and the numbers never
/// change. `stream` is typically a path id, `index` the step within the path.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix64(seed ^ mix64(stream + 0x5851f42d4c957f2dULL))) {}

    // Uniform in the open interval (0,1).
    double uniform(std::uint64_t index) const {
        std::uint64_t bits = mix64(key_ + index * 0x9e3779b97f4a7c15ULL);
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    // index-th standard normal of this stream (Box-Muller on counter pairs).
    double normal(std::uint64_t index) const {
        std::uint64_t pair = index >> 1;
        double u1 = uniform(2 * pair);
        double u2 = uniform(2 * pair + 1);
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * std::numbers::pi * u2;
        return (index & 1) ? radius * std::sin(angle) : radius * std::cos(angle);
    }

private:
    std::uint64_t key_;
};

// Per-point seed derivation used by experiment grids: decouples the master
// seed from the stream ids consumed inside one grid point.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t point_index) {
    return mix64(master ^ mix64(point_index + 0xc2b2ae3d27d4eb4fULL));
}

}  // namespace sdetv
