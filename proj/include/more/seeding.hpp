// seeding.hpp -- deterministic derivation of per-task sub-seeds from one base seed.
#pragma once

#include <cstdint>

namespace more {

/// splitmix64 finalizer. Good avalanche, cheap, stable across platforms.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent sub-seed from a base seed and up to two stream labels.
/// Every consumer of randomness gets its own stream so that reordering
/// independent tasks never changes their results.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(base ^ 0x6d6f726574ULL) ^ splitmix64(a) ^ (splitmix64(b) << 1));
}

}  // namespace more
