#pragma once

#include <cstdint>
#include <string_view>

namespace emomem::detail {

// 64-bit FNV-1a. Used for feature hashing and deterministic mock replies;
// not a cryptographic hash.
inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t seed = 14695981039346656037ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace emomem::detail
