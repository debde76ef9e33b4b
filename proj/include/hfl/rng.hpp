#pragma once

#include <cstdint>
#include <initializer_list>

namespace hfl {

/// splitmix64 step.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and a coordinate
/// tuple (stream tag, round indices, device id, ...). Folding each component
/// through splitmix64 keeps nearby tuples uncorrelated.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coords) {
    std::uint64_t state = base ^ 0xd1b54a32d192ed03ULL;
    std::uint64_t out = splitmix64(state);
    for (std::uint64_t c : coords) {
        state ^= c + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
        out = splitmix64(state);
    }
    return out;
}

}  // namespace hfl
