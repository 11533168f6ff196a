#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qdbn {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive well-separated seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream addressed by (seed, a, b, c). Streams for distinct
// addresses are uncorrelated regardless of evaluation order, so parallel
// workers can own disjoint streams.
inline Rng make_stream(std::uint64_t seed, std::uint64_t a = 0,
                       std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = mix64(seed);
    s = mix64(s ^ mix64(a ^ 0x517cc1b727220a95ULL));
    s = mix64(s ^ mix64(b ^ 0x2545f4914f6cdd1dULL));
    s = mix64(s ^ mix64(c ^ 0xd1342543de82ef95ULL));
    return Rng(s);
}

// Uniform double in [0,1) with 53 random bits; avoids the
// implementation-defined behaviour of std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

inline int uniform_below(Rng& rng, int n) {
    return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

inline double gaussian(Rng& rng, double mean = 0.0, double sd = 1.0) {
    std::normal_distribution<double> d(mean, sd);
    return d(rng);
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = rng() % i;
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace qdbn
