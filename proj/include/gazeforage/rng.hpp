#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace gazeforage {

// splitmix64 mix step; used to derive independent substream seeds so that one
// user-facing seed determines every draw in every phase.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 1));
}

// mt19937_64 with hand-rolled variate transforms. The standard pins the
// engine's output sequence but not the distributions', so every transform
// here is explicit and the full stream is reproducible across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; one variate per call, no cached spare.
    double normal(double mean, double sigma) {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return mean + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Geometric on {1, 2, ...} with success probability p in (0, 1].
    std::uint64_t geometric(double p) {
        if (p >= 1.0) return 1;
        const double u = uniform();
        return 1 + static_cast<std::uint64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
    }

    // Index in [0, n).
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace gazeforage
