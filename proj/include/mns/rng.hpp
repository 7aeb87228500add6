#pragma once

#include <cstdint>
#include <initializer_list>

namespace mns::rng {

/// SplitMix64 step (Steele, Lea & Flood 2014). Used as the mixing function of
/// every random stream in the library.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Counter-based generator: the draw at coordinates (c0, c1, ...) under a seed
/// is splitmix64 chained over the coordinates,
///   h = splitmix64(seed); h = splitmix64(h ^ c0); h = splitmix64(h ^ c1); ...
/// No sequential state, so draws are reproducible from the coordinates alone
/// and independent of evaluation order or thread schedule.
constexpr std::uint64_t hash_coords(std::uint64_t seed, std::initializer_list<std::uint64_t> coords) {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t c : coords) h = splitmix64(h ^ c);
    return h;
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

// Stream tags. Different tags give independent streams under one seed.
inline constexpr std::uint64_t kStreamXi = 1;           // node latent positions
inline constexpr std::uint64_t kStreamEta = 2;          // layer latent positions
inline constexpr std::uint64_t kStreamAdjacency = 3;    // Bernoulli edge draws
inline constexpr std::uint64_t kStreamMask = 4;         // edge-removal masks
inline constexpr std::uint64_t kStreamReplication = 5;  // per-replication seed derivation

/// Seed for replication `index` under a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return hash_coords(master, {kStreamReplication, index});
}

}  // namespace mns::rng
