#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>

namespace pspin {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based seed derivation: the result depends only on the key values,
/// never on the order in which tasks are scheduled.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> key) {
    std::uint64_t s = mix64(base);
    for (std::uint64_t k : key) s = mix64(s ^ mix64(k + 0x632be59bd9b4e019ULL));
    return s;
}

/// Seed for one restart at one grid point.
inline std::uint64_t task_seed(std::uint64_t base, int n_sites, int depth, double field, int restart) {
    return derive_seed(base, {static_cast<std::uint64_t>(n_sites), static_cast<std::uint64_t>(depth),
                              std::bit_cast<std::uint64_t>(field), static_cast<std::uint64_t>(restart)});
}

}  // namespace pspin
