#pragma once

#include <cstdint>
#include <cstddef>

#include "rqmc/errors.hpp"

namespace rqmc {

// Counter-based randomness. Every random quantity in the library is a pure
// function of a fixed-arity word tuple (seed, replicate, role/dimension,
// counter words), so results never depend on evaluation order or thread
// scheduling and any draw can be recomputed in O(1).

// SplitMix64 finalizer; full-avalanche 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Hashes exactly five words; callers pad with zeros. Fixed arity keeps the
// domain separation between call sites unambiguous.
inline std::uint64_t keyed_hash(std::uint64_t w0, std::uint64_t w1, std::uint64_t w2,
                                std::uint64_t w3 = 0, std::uint64_t w4 = 0) {
    std::uint64_t h = mix64(w0 + kGolden);
    h = mix64((h + kGolden) ^ w1);
    h = mix64((h + kGolden) ^ w2);
    h = mix64((h + kGolden) ^ w3);
    h = mix64((h + kGolden) ^ w4);
    return h;
}

// Role tags. Folded into the third hash word together with dimension/depth
// so distinct consumers can never collide.
enum class RandomRole : std::uint64_t {
    mc_point = 1,
    nested_perm = 2,
    nested_tail = 3,
    linear_matrix = 4,
    digital_shift = 5,
    lattice_rotation = 6,
    corner_search = 7,
    derived_seed = 8,
};

inline std::uint64_t role_word(RandomRole role, std::uint64_t dim = 0, std::uint64_t depth = 0) {
    return (static_cast<std::uint64_t>(role) << 56) | (depth << 32) | dim;
}

// Uniform double in [0,1) from the top 53 bits.
inline double unit_double(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// h mod n via multiply-shift; bias is O(n / 2^64).
inline std::uint32_t uniform_below(std::uint64_t h, std::uint32_t n) {
    return static_cast<std::uint32_t>((static_cast<unsigned __int128>(h) * n) >> 64);
}

// Unranks h mod b! into a permutation of {0,...,b-1} (factorial number
// system). Supports b <= 20 so b! fits in 64 bits.
inline void unrank_permutation(std::uint64_t h, int b, std::uint8_t* out) {
    if (b < 1 || b > 20) throw config_error("unrank_permutation: base must be in [1,20]");
    std::uint64_t fact = 1;
    for (int i = 2; i <= b; ++i) fact *= static_cast<std::uint64_t>(i);
    std::uint64_t r = h % fact;
    std::uint8_t pool[20];
    for (int i = 0; i < b; ++i) pool[i] = static_cast<std::uint8_t>(i);
    int remaining = b;
    for (int i = 0; i < b; ++i) {
        fact /= static_cast<std::uint64_t>(remaining);
        int pick = static_cast<int>(r / fact);
        r %= fact;
        out[i] = pool[pick];
        for (int j = pick; j < remaining - 1; ++j) pool[j] = pool[j + 1];
        --remaining;
    }
}

// Derives an independent child seed, e.g. one per replicate or worker task.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return keyed_hash(seed, stream, role_word(RandomRole::derived_seed));
}

} // namespace rqmc
