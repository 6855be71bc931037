#pragma once

#include <cstdint>

namespace cqb {

// Counter-based splittable generator (splitmix64 finalizer). Draw i under
// seed s is a pure function of (s, i), so parallel consumers agree on the
// stream regardless of scheduling.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rng_at(std::uint64_t seed, std::uint64_t counter) {
    return mix64(mix64(seed) ^ mix64(counter * 0x2545f4914f6cdd1dULL + 0x9e3779b97f4a7c15ULL));
}

// Stable per-task seed derivation (parallel samples, sub-experiments).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return rng_at(seed, index ^ 0xd1b54a32d192ed03ULL);
}

// Uniform integer in [0, bound) by rejection-free 128-bit scaling; the
// modulo bias is < bound/2^64 which is irrelevant for test-data use.
inline std::uint64_t rng_below(std::uint64_t seed, std::uint64_t counter, std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(rng_at(seed, counter)) * bound) >> 64);
}

}  // namespace cqb
