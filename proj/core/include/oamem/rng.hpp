#pragma once

#include <cstdint>
#include <random>

namespace oamem {

/// Engine used by every stochastic operation. Streams are derived from a
/// root seed with split_seed, so results replay exactly for a given build.
using Engine = std::mt19937_64;

/// SplitMix64 mix of (seed, stream): independent child seeds for parallel work.
constexpr std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
    return Engine(split_seed(seed, stream));
}

}  // namespace oamem
