#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace intdim {

using Engine = std::mt19937_64;

// splitmix64 finalizer; turns structured (seed, stream) pairs into well-mixed seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
    return Engine(derive_seed(seed, stream));
}

/// m distinct indices from [0, n), uniformly, returned in ascending order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m, std::uint64_t seed);

} // namespace intdim
