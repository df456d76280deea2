// rng.hpp — Seeded, splittable random generation for shot sampling.
//
// A master seed plus a list of integer labels (pathway index, grid index,
// circuit index, ...) deterministically derives an independent stream seed,
// so parallel evaluations are reproducible regardless of scheduling order.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace exspec::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive a child seed from a master seed and a label path.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> labels) {
    std::uint64_t h = splitmix64(master ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t v : labels) {
        h = splitmix64(h ^ splitmix64(v));
    }
    return h;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

} // namespace exspec::rng
