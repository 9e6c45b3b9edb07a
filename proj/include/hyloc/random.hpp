#pragma once

#include <cstdint>
#include <random>

namespace hyloc {

// SplitMix64 finalizer; used to derive independent seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for stream `index` under `master`; independent of scheduling order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(master ^ splitmix64(index + 0x5851f42d4c957f2dULL));
}

// Seed stream for undersampling, kept apart from the per-tree streams 0..M-1.
inline constexpr std::uint64_t kUndersampleStream = 0x756e646572ULL;

// Uniform integer in [0, n) from raw mt19937_64 output. std::uniform_int_distribution
// is implementation-defined, so it is avoided where results are persisted.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % n;
}

}  // namespace hyloc
