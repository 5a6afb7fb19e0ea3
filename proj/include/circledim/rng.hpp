#pragma once

#include <cstdint>
#include <span>

namespace circledim {

// Splittable counter-based generator: output i is a stateless hash of
// (key, i), so parallel consumers can split by key and merge results
// with bitwise reproducibility. The mixer is the splitmix64 finalizer.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static CounterRng split(std::uint64_t key, std::uint64_t stream) {
        return CounterRng(mix(key ^ (0x9e3779b97f4a7c15ULL * (stream + 1))));
    }

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * (++counter_)); }

    // Uniform in [0,1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Index sampled from a cumulative weight table (weights sum to ~1).
    int pick(std::span<const double> cumulative) {
        double u = next_double();
        int n = static_cast<int>(cumulative.size());
        for (int i = 0; i < n; ++i)
            if (u < cumulative[static_cast<std::size_t>(i)]) return i;
        return n - 1;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace circledim
