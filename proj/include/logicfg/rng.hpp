#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace logicfg {

// Deterministic generator for seed-dependent orders and instance sampling;
// identical across platforms, unlike the standard distributions.
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
    bool chance(double p) { return next() < static_cast<double>(UINT64_MAX) * p; }
};

template <typename T>
void shuffle_in_place(std::vector<T>& v, SplitMix64& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.next() % i]);
}

} // namespace logicfg
