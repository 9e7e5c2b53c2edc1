#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "pmcw/types.hpp"

namespace pmcw {

// splitmix64 finalizer (Steele, Lea, Flood 2014). Used as the mixing core of a
// counter-based generator: every variate is a pure function of (seed, stream,
// index), so parallel evaluation order cannot change the result and runs are
// bit-identical across platforms. std::normal_distribution and friends are
// implementation defined and would break that guarantee.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(splitmix64(seed ^ (0x632be59bd9b4e019ULL * (stream + 1)))) {}

    // 64 random bits for index i.
    std::uint64_t bits(std::uint64_t i) const {
        return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * (i + 1));
    }

    // uniform on [0, 1), 53-bit resolution
    double uniform(std::uint64_t i) const {
        return static_cast<double>(bits(i) >> 11) * 0x1.0p-53;
    }

    // uniform on (0, 1], for safe use under log()
    double uniform_pos(std::uint64_t i) const {
        return static_cast<double>((bits(i) >> 11) + 1) * 0x1.0p-53;
    }

    // circularly symmetric complex Gaussian, E|w|^2 = 1 (Box-Muller)
    cdouble complex_gaussian(std::uint64_t i) const {
        const double u1 = uniform_pos(2 * i);
        const double u2 = uniform(2 * i + 1);
        const double r = std::sqrt(-std::log(u1)); // sqrt(2 * -log/2): variance 1/2 per part
        return {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
    }

private:
    std::uint64_t key_;
};

// K i.i.d. phases uniform on [0, 2*pi), the stock initialization for codes.
inline std::vector<double> random_phases(std::size_t k, std::uint64_t seed,
                                         std::uint64_t stream = 0) {
    CounterRng rng(seed, stream);
    std::vector<double> ph(k);
    for (std::size_t i = 0; i < k; ++i) ph[i] = two_pi * rng.uniform(i);
    return ph;
}

} // namespace pmcw
