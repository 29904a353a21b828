#pragma once

#include <cstdint>
#include <random>

// Seeded streams for the simulation harness. Each replicate owns an
// independent substream derived from (master seed, replicate index), so
// results do not depend on thread count or iteration order.

namespace fdrkit {

// SplitMix64 step; used only to mix seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d4a2ca9f53d65dULL;
    return z ^ (z >> 31);
}

// mt19937_64 seeded by splitmix64-mixed (seed, index).
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x632be59bd9b4e019ULL * (index + 1));
    std::seed_seq seq{static_cast<unsigned>(splitmix64(s)),
                      static_cast<unsigned>(splitmix64(s) >> 32),
                      static_cast<unsigned>(splitmix64(s)),
                      static_cast<unsigned>(splitmix64(s) >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace fdrkit
