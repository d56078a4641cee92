#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace shedad {

/// splitmix64: 64-bit-state generator (the SplittableRandom finalizer,
/// public-domain constants).  One xor-shift-multiply chain per draw, full
/// period 2^64, trivially seedable.  Every stochastic choice in the project
/// goes through this class so that a run is reproducible from a single
/// 64-bit seed.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [0, bound) via modulo reduction.  The tiny modulo
    /// bias is irrelevant for the bounds used here (< 2^20) and keeps the
    /// draw sequence easy to restate in other languages.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
        return next() % bound;
    }

    /// Uniform double in [0, 1) with 53 random mantissa bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Inclusive integer range.
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        if (hi < lo) throw std::invalid_argument("next_int: empty range");
        return lo + static_cast<std::int64_t>(next_below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// Standard normal via Box-Muller (one value per call, no caching, so
    /// the draw count stays predictable).
    double next_gaussian() {
        double u1 = next_unit();
        double u2 = next_unit();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::uint64_t state_;
};

/// Decorrelated child seed for a named sub-stream (per-substation noise,
/// day sampling, fault placement, ...).  Mixing through one splitmix step
/// keeps nearby (seed, stream) pairs statistically independent.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ull * (stream + 0x632be59bd9b4e019ull)));
    return g.next();
}

/// Draw `count` distinct indices from [0, n) by partial Fisher-Yates over
/// an index table; selection order is the draw order.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count, SplitMix64& rng) {
    if (count > n) throw std::invalid_argument("sample_indices: count exceeds population");
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> picked;
    picked.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(pool[i], pool[j]);
        picked.push_back(pool[i]);
    }
    return picked;
}

}  // namespace shedad
