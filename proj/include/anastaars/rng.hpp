#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace anastaars {

/// All randomness flows through explicitly passed streams of this type, so a
/// run is reproducible from its seed alone.
using Rng = std::mt19937_64;

/// FNV-1a 64-bit hash; used to derive stable per-cell seeds from cell labels.
inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace anastaars
