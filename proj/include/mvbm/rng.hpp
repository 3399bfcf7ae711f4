#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace mvbm {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the substream addressed by (seed, path...). Streams with different
/// paths are independent for practical purposes, and each one can be built
/// without touching any other.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(seed, path));
}

/// Pairwise (cascade) summation; result depends only on the input order.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

} // namespace mvbm
