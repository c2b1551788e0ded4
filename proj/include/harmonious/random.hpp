#ifndef HARMONIOUS_RANDOM_HPP
#define HARMONIOUS_RANDOM_HPP

// std::mt19937_64 has a fixed output sequence, but the standard distributions
// and std::shuffle do not. The draws below are spelled out so that seeded runs
// are reproducible across standard libraries.

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace harmonious {

using Rng = std::mt19937_64;

/// Uniform value in [0, bound). bound must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    const std::uint64_t limit = Rng::max() - Rng::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

inline int uniform_int(Rng& rng, int bound) {
    return static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(bound)));
}

/// True with probability p.
inline bool bernoulli(Rng& rng, double p) {
    if (p <= 0.0) return false;
    // 53 random bits
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return u < p;
}

template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = uniform_below(rng, i);
        std::swap(values[i - 1], values[j]);
    }
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace harmonious

#endif  // HARMONIOUS_RANDOM_HPP
