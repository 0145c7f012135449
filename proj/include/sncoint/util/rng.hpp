#pragma once

#include <cstdint>
#include <random>

namespace sncoint {

using Engine = std::mt19937_64;

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/// Derives an independent 64-bit key from a parent key and a counter.
/// Streams are addressed by (seed, index, ...) so results never depend on
/// which worker executes which replication.
inline constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index,
                                           std::uint64_t salt = 0) noexcept {
    std::uint64_t h = detail::splitmix64(parent ^ 0x6a09e667f3bcc909ULL);
    h = detail::splitmix64(h ^ index);
    return detail::splitmix64(h ^ (salt * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0) {
    return Engine(derive_seed(seed, index, salt));
}

} // namespace sncoint
