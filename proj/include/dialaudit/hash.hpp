#pragma once

// Stable 64-bit hashing. std::hash is implementation-defined, so everything
// that must reproduce across runs and machines (splits, synthetic corpora,
// report input digests) goes through these.

#include <cstdint>
#include <string_view>

namespace dialaudit {

inline uint64_t fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ull) {
    uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace dialaudit
