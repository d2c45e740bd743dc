// Seed plumbing: every random draw in the toolkit flows from one root seed
// through a named substream, so adding a consumer never perturbs the others.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace uavpe {

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Derive a child seed from (root, name). Stable across platforms.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view name) {
    std::uint64_t state = root ^ fnv1a64(name);
    std::uint64_t s = splitmix64(state);
    s ^= splitmix64(state);
    return s;
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view name, std::uint64_t index) {
    std::uint64_t state = derive_seed(root, name) ^ (0x632be59bd9b4e019ull * (index + 1));
    return splitmix64(state);
}

/// Named substream generator.
inline std::mt19937_64 make_stream(std::uint64_t root, std::string_view name) {
    return std::mt19937_64(derive_seed(root, name));
}

inline std::mt19937_64 make_stream(std::uint64_t root, std::string_view name, std::uint64_t index) {
    return std::mt19937_64(derive_seed(root, name, index));
}

}  // namespace uavpe
