#ifndef TEXTILE_RANDOM_HPP
#define TEXTILE_RANDOM_HPP

#include <cstdint>
#include <string_view>

namespace textile {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Stable per-stage seed derived from the global seed and a stage name.
inline std::uint64_t derive_seed(std::uint64_t global, std::string_view stage) {
    return splitmix64(global ^ splitmix64(fnv1a64(stage)));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

}  // namespace textile

#endif  // TEXTILE_RANDOM_HPP
