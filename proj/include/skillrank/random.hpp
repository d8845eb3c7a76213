#pragma once

// Portable seeded randomness. std::mt19937_64 output is fixed by the standard,
// but the standard distributions are not, so the few draws we need are
// derived from raw engine output here.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace skillrank {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent generator per (seed, phase name). Adding a phase never shifts
/// the draws of another one.
class Rng {
public:
    Rng(std::uint64_t seed, std::string_view phase) : engine_(derive(seed, phase)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, bound), unbiased.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Index drawn with probability proportional to `weights` (non-negative,
    /// positive total).
    std::size_t weighted_index(std::span<const double> weights, double total) {
        double r = uniform() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            r -= weights[i];
            if (r < 0.0) return i;
        }
        for (std::size_t i = weights.size(); i-- > 0;) {
            if (weights[i] > 0.0) return i;
        }
        return 0;
    }

private:
    static std::uint64_t derive(std::uint64_t seed, std::string_view phase) {
        std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
        for (char c : phase) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return splitmix64(splitmix64(seed) ^ h);
    }

    std::mt19937_64 engine_;
};

}  // namespace skillrank
