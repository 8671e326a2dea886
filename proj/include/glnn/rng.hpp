#pragma once
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace glnn::rng {

// SplitMix64 finalizer, used to derive independent stream seeds from
// (seed, tag) pairs.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(seed ^ splitmix64(tag + 0x632be59bd9b4e019ull));
}

using Engine = std::mt19937_64;

// Uniform in [0,1) from the top 53 bits. std::uniform_real_distribution is
// implementation-defined and would break byte-reproducibility of outputs.
inline double u01(Engine& eng) {
    return double(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& eng, double lo, double hi) {
    return lo + (hi - lo) * u01(eng);
}

// Unbiased draw in [0, bound) by rejection.
inline std::uint64_t below(Engine& eng, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t(0) - ~std::uint64_t(0) % bound;
    std::uint64_t x;
    do {
        x = eng();
    } while (x >= limit);
    return x % bound;
}

// Portable Fisher-Yates (std::shuffle is implementation-defined).
template <class T>
void shuffle(std::vector<T>& v, Engine& eng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[below(eng, i)]);
}

} // namespace glnn::rng
