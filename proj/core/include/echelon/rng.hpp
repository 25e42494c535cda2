#pragma once

#include <cstdint>
#include <random>

namespace echelon {

/// Seedable 64-bit generator handle. Every stochastic operation in the
/// library takes one of these explicitly; one generator per concurrent
/// strand. Wraps std::mt19937_64 so runs are reproducible bit-for-bit
/// for a given seed and binary.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ULL) : engine_(seed) {}

    std::uint64_t operator()() { return engine_(); }

    static constexpr std::uint64_t min() { return std::mt19937_64::min(); }
    static constexpr std::uint64_t max() { return std::mt19937_64::max(); }

    /// Uniform draw on (0,1); never returns exactly 0 or 1, so it is safe
    /// to feed into quantile transforms.
    double uniform01() {
        // 53-bit mantissa, shifted off zero.
        const std::uint64_t u = engine_() >> 11;
        return (static_cast<double>(u) + 0.5) * (1.0 / 9007199254740992.0);
    }

    /// Uniform integer on [0, n).
    std::uint64_t uniform_below(std::uint64_t n) {
        std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
        return d(engine_);
    }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 step; used to derive independent replication seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for replication `index` of an experiment seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index * 0xd1342543de82ef95ULL + 1));
}

} // namespace echelon
